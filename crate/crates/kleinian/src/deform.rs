//! Verification surface for deformed block families: given user-supplied
//! groups claimed conjugate to the exact blocks by a K-quasiconformal map,
//! run the necessary-condition pipeline with the instance's own strip
//! constant and rebuild the combined groups from it.
//!
//! No quasiconformal maps are ever constructed; the checks are necessary
//! conditions whose failure falsifies the claim, never a proof of it.

use serde::Serialize;

use crate::combine::CombinedGroup;
use crate::error::{Error, Result};
use crate::invariance::{
    check_precisely_invariant, jorgensen_check, min_strip_constant, strip_confinement, Alphabet,
    InvarianceOutcome, Violation,
};
use crate::limitset::enumerate_limit_points;
use crate::marked::MarkedGroup;
use crate::moebius::MoebiusMap;
use crate::region::Region;
use crate::scalar::{Scalar, TOL_CLASS};
use crate::shuffle::{build_gamma_k, build_gamma_k_tau, ShufflePlan};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Violated,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanSummary {
    pub k: usize,
    pub c: u64,
    pub primes: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeformationReport {
    pub groups: Vec<String>,
    /// The K claimed for the deformation; recorded, not used computationally
    /// (the instance strip constant is what gets checked).
    pub claimed_k: Option<f64>,
    pub c_inst: f64,
    pub word_length: usize,
    pub checks: Vec<CheckOutcome>,
    pub verdict: Verdict,
    /// Set when c_inst exceeded the plan's C and the plan was rebuilt with
    /// C' = ceil(c_inst).
    pub rebuilt_plan: Option<PlanSummary>,
    pub witness: Option<Violation>,
}

/// Wrapper giving the serialized report its section name.
#[derive(Debug, Clone, Serialize)]
pub struct DeformationReportFile {
    #[serde(rename = "theoremB")]
    pub theorem_b: DeformationReport,
}

impl DeformationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DeformationReportFile {
            theorem_b: self.clone(),
        })
        .expect("report serializes")
    }
}

/// Outcome of the full pipeline: the report plus the rebuilt groups when the
/// checks pass.
pub struct DeformationOutcome {
    pub report: DeformationReport,
    pub plan_used: ShufflePlan,
    /// (stacked, shuffled, extended) per coset representative, in rep order;
    /// the stacked group is shared.
    pub stacked: Option<CombinedGroup>,
    pub shuffled: Vec<(usize, CombinedGroup, CombinedGroup)>,
}

/// Run the deformed-block pipeline: boundary normalization, the Jorgensen
/// rows, the per-block precise-invariance check at the instance strip
/// constant, strip confinement of sampled points, plan feasibility (with an
/// automatic rebuild at C' = ceil(c_inst) when needed), and the rebuild of
/// the stacked, shuffled and extended groups for every marked class.
pub fn verify_deformed_blocks(
    blocks: &[MarkedGroup],
    plan: &ShufflePlan,
    word_budget: usize,
    claimed_k: Option<f64>,
) -> Result<DeformationOutcome> {
    if blocks.len() != plan.k {
        return Err(Error::Precondition(format!(
            "need {} blocks, got {}",
            plan.k,
            blocks.len()
        )));
    }
    let mut checks: Vec<CheckOutcome> = Vec::new();
    let mut witness: Option<Violation> = None;
    let mut ok = true;

    // Boundary normalization: each block must contain xi_1 as its boundary.
    for b in blocks {
        let xi1 = MoebiusMap::xi_one(b.mode());
        if !b.boundary_map().proj_eq_tol(&xi1, TOL_CLASS) {
            return Err(Error::Precondition(format!(
                "block {} does not realize xi_1 as its boundary",
                b.id
            )));
        }
    }
    checks.push(CheckOutcome {
        name: "boundary-normalization".into(),
        pass: true,
        detail: format!("{} blocks realize xi_1", blocks.len()),
    });

    // All word arithmetic below runs on exact dyadic rationalizations of
    // the inputs: float products at plan heights cancel catastrophically,
    // while exact products keep the original entry noise un-amplified.
    let blocks: Vec<MarkedGroup> = blocks
        .iter()
        .map(|b| b.rationalized())
        .collect::<Result<Vec<_>>>()?;
    let blocks = &blocks[..];

    // Jorgensen rows.
    let mut jorgensen_ok = true;
    let mut jorgensen_detail = String::new();
    for b in blocks {
        for row in jorgensen_check(b) {
            if !row.pass {
                jorgensen_ok = false;
                jorgensen_detail = format!(
                    "{}: pair ({}, {}) has quantity {:?} < 1",
                    b.id, row.pair.0, row.pair.1, row.quantity
                );
            }
        }
    }
    ok &= jorgensen_ok;
    checks.push(CheckOutcome {
        name: "jorgensen".into(),
        pass: jorgensen_ok,
        detail: if jorgensen_ok {
            "all non-elementary pairs at or above 1".into()
        } else {
            jorgensen_detail
        },
    });

    // Instance strip constant.
    let c_inst = blocks
        .iter()
        .map(|b| min_strip_constant(&Alphabet::from_marked(b), word_budget))
        .fold(0.0f64, f64::max);
    let c_finite = c_inst.is_finite();
    checks.push(CheckOutcome {
        name: "strip-constant".into(),
        pass: c_finite,
        detail: format!("c_inst = {c_inst} at L = {word_budget}"),
    });
    ok &= c_finite;

    // Per-block precise invariance at the instance constant (nudged off the
    // bisection boundary to avoid a tangency artifact).
    let c_check = if c_finite {
        c_inst * (1.0 + 1e-9) + 1e-12
    } else {
        plan.c as f64
    };
    let mut invariance_ok = true;
    let mut invariance_detail = format!("H_{c_check} and H*_{} at L = {word_budget}", -c_check);
    for b in blocks {
        let regions = [
            Region::upper(Scalar::from_f64(c_check, 0.0)),
            Region::lower(Scalar::from_f64(-c_check, 0.0)),
        ];
        match check_precisely_invariant(&Alphabet::from_marked(b), &regions, word_budget)? {
            InvarianceOutcome::Certificate(_) => {}
            InvarianceOutcome::Violation(v) => {
                invariance_ok = false;
                invariance_detail =
                    format!("block {} violates invariance: witness {}", b.id, v.witness_word);
                witness = Some(v);
            }
        }
        if !invariance_ok {
            break;
        }
    }
    ok &= invariance_ok;
    checks.push(CheckOutcome {
        name: "precise-invariance".into(),
        pass: invariance_ok,
        detail: invariance_detail,
    });

    // Strip confinement of sampled limit points at the instance constant.
    let mut confinement_ok = true;
    let mut confinement_detail = String::new();
    if c_finite {
        for b in blocks {
            let cloud = enumerate_limit_points(
                &b.id,
                &b.gens,
                word_budget.min(6) + 2,
                1e-6,
                200_000,
            )?;
            let (pass, worst) =
                strip_confinement(&cloud.points, -c_inst, c_inst, TOL_CLASS);
            if !pass {
                confinement_ok = false;
                confinement_detail = format!(
                    "block {}: sampled point {:?} outside the strip of height {c_inst}",
                    b.id, worst
                );
                break;
            }
        }
    } else {
        confinement_ok = false;
        confinement_detail = "no finite strip constant".into();
    }
    ok &= confinement_ok;
    checks.push(CheckOutcome {
        name: "strip-confinement".into(),
        pass: confinement_ok,
        detail: if confinement_ok {
            format!("all sampled points within the strip at {c_inst}")
        } else {
            confinement_detail
        },
    });

    // Plan feasibility: rebuild when c_inst exceeds the plan constant.
    let mut rebuilt = None;
    let plan_used = if c_finite && c_inst > plan.c as f64 {
        let c_new = c_inst.ceil() as u64;
        let new_plan = ShufflePlan::build(plan.k, c_new)?;
        rebuilt = Some(PlanSummary {
            k: new_plan.k,
            c: new_plan.c,
            primes: new_plan.primes.clone(),
        });
        checks.push(CheckOutcome {
            name: "plan-feasibility".into(),
            pass: true,
            detail: format!("rebuilt with C' = {c_new} (c_inst = {c_inst} > C = {})", plan.c),
        });
        new_plan
    } else {
        checks.push(CheckOutcome {
            name: "plan-feasibility".into(),
            pass: c_finite,
            detail: if c_finite {
                format!("c_inst = {c_inst} <= C = {}", plan.c)
            } else {
                "no finite strip constant".into()
            },
        });
        plan.clone()
    };

    // Rebuild the combined groups for every marked class.
    let mut stacked = None;
    let mut shuffled = Vec::new();
    if ok {
        match build_gamma_k(&plan_used, blocks, word_budget) {
            Ok(g) => stacked = Some(g),
            Err(e) => {
                ok = false;
                checks.push(CheckOutcome {
                    name: "rebuild-stacked".into(),
                    pass: false,
                    detail: e.to_string(),
                });
            }
        }
    }
    if ok {
        checks.push(CheckOutcome {
            name: "rebuild-stacked".into(),
            pass: true,
            detail: "stacked group rebuilt with certificates".into(),
        });
        for idx in 0..plan_used.reps.len() {
            match build_gamma_k_tau(&plan_used, idx, blocks, word_budget) {
                Ok((s, e)) => shuffled.push((idx, s, e)),
                Err(err) => {
                    ok = false;
                    checks.push(CheckOutcome {
                        name: format!("rebuild-shuffled-{idx}"),
                        pass: false,
                        detail: err.to_string(),
                    });
                    break;
                }
            }
        }
        if ok {
            checks.push(CheckOutcome {
                name: "rebuild-shuffled".into(),
                pass: true,
                detail: format!(
                    "{} shuffled companions and extensions rebuilt",
                    shuffled.len()
                ),
            });
        }
    }

    let report = DeformationReport {
        groups: blocks.iter().map(|b| b.id.clone()).collect(),
        claimed_k,
        c_inst,
        word_length: word_budget,
        checks,
        verdict: if ok { Verdict::Consistent } else { Verdict::Violated },
        rebuilt_plan: rebuilt,
        witness,
    };
    Ok(DeformationOutcome {
        report,
        plan_used,
        stacked,
        shuffled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::{genus_cover_group, markov_family, punctured_torus_group};
    use crate::marked::{GroupKind, GroupWord};
    use num_complex::Complex64;

    fn exact_blocks() -> Vec<MarkedGroup> {
        (1..=3).map(|j| genus_cover_group(j).unwrap()).collect()
    }

    #[test]
    fn undeformed_blocks_are_consistent() {
        let plan = ShufflePlan::build(3, 1).unwrap();
        let out = verify_deformed_blocks(&exact_blocks(), &plan, 2, Some(1.0)).unwrap();
        assert_eq!(out.report.verdict, Verdict::Consistent);
        assert!(out.report.c_inst <= 1.0, "c_inst = {}", out.report.c_inst);
        assert!(out.report.rebuilt_plan.is_none());
        assert_eq!(out.shuffled.len(), 2);
    }

    #[test]
    fn markov_specimen_is_consistent() {
        let plan = ShufflePlan::build(3, 1).unwrap();
        let mut blocks = exact_blocks();
        blocks[0] = markov_family(Complex64::new(3.0, 0.1), Complex64::new(3.0, 0.0)).unwrap();
        let out = verify_deformed_blocks(&blocks, &plan, 2, Some(1.2)).unwrap();
        assert_eq!(out.report.verdict, Verdict::Consistent);
        assert!(out.report.c_inst.is_finite());
    }

    #[test]
    fn corrupted_block_is_violated_with_witness() {
        let plan = ShufflePlan::build(3, 1).unwrap();
        let mut blocks = exact_blocks();
        // Adjoin a drifting parabolic: it translates every horizontal
        // half-plane onto an overlapping one, so no strip can be precisely
        // invariant.
        let base = punctured_torus_group().unwrap();
        let mut names = base.gen_names.clone();
        names.push("E".into());
        let mut gens: Vec<MoebiusMap> = base.gens.iter().map(|g| g.to_float()).collect();
        gens.push(MoebiusMap::translation(Scalar::from_f64(0.5, 0.2)));
        blocks[0] = MarkedGroup::new(
            "corrupted",
            names,
            gens,
            base.boundary_word.clone(),
            None,
            GroupKind::QuasifuchsianNumeric,
        )
        .unwrap();
        let out = verify_deformed_blocks(&blocks, &plan, 2, None).unwrap();
        assert_eq!(out.report.verdict, Verdict::Violated);
        let w = out.report.witness.as_ref().expect("witness recorded");
        assert!(w.witness_word.contains('E'));
    }

    #[test]
    fn report_monotone_in_budget() {
        let plan = ShufflePlan::build(3, 1).unwrap();
        let blocks = exact_blocks();
        let at3 = verify_deformed_blocks(&blocks, &plan, 3, None).unwrap();
        assert_eq!(at3.report.verdict, Verdict::Consistent);
        let at2 = verify_deformed_blocks(&blocks, &plan, 2, None).unwrap();
        assert_eq!(at2.report.verdict, Verdict::Consistent);
    }

    #[test]
    fn missing_boundary_is_a_precondition_error() {
        let plan = ShufflePlan::build(3, 1).unwrap();
        let mut blocks = exact_blocks();
        // A group whose boundary word evaluates to xi_2 instead of xi_1.
        let bad = MarkedGroup {
            id: "bad".into(),
            gen_names: vec!["X".into()],
            gens: vec![MoebiusMap::translation(Scalar::exact_int(2, 0))],
            boundary_word: GroupWord(vec![(0, 1)]),
            genus: None,
            kind: GroupKind::QuasifuchsianNumeric,
        };
        blocks[0] = bad;
        assert!(matches!(
            verify_deformed_blocks(&blocks, &plan, 2, None),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn report_serializes_with_section() {
        let plan = ShufflePlan::build(3, 1).unwrap();
        let out = verify_deformed_blocks(&exact_blocks(), &plan, 2, Some(1.0)).unwrap();
        let json = out.report.to_json();
        assert!(json.contains("\"theoremB\""));
        assert!(json.contains("\"verdict\": \"consistent\""));
    }
}
