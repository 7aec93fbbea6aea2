use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::bounds::{self, BoundInputs, TailValue, CONCURRENCE_BETA_MIN, EOF_BETA_MIN};
use crate::error::{Error, Result};
use crate::measures::{self, MeasureKind};
use crate::qstate::{self, GsdParams, QubitPartition};
use crate::roof::RoofConfig;

/// Grid points strictly above the regime boundary used for the gap check.
const GAP_POINTS: usize = 50;
const BETA_TOP: f64 = 10.0;

/// Schmidt weights of the worked examples; 1 and 3 share a state.
pub fn example_params(id: u8) -> Result<GsdParams> {
    let third = 1.0 / 3.0;
    let lambda = match id {
        1 | 3 => [SQRT_2 * third, 0.0, 5f64.sqrt() * third, SQRT_2 * third, 0.0],
        2 => [6f64.sqrt() * third, 0.0, SQRT_2 * third, third, 0.0],
        _ => return Err(Error::Config(format!("no example {id}; expected 1, 2 or 3"))),
    };
    GsdParams::new(lambda, 0.0)
}

pub(crate) fn example_measure(id: u8) -> Result<MeasureKind> {
    match id {
        1 => Ok(MeasureKind::Concurrence),
        2 => Ok(MeasureKind::Eof),
        3 => Ok(MeasureKind::Cren),
        _ => Err(Error::Config(format!("no example {id}; expected 1, 2 or 3"))),
    }
}

/// `(X_{A|BC}, X_AB, X_AC)` for the example's measure, computed from the state.
pub(crate) fn example_values(id: u8) -> Result<(f64, f64, f64)> {
    let psi = qstate::make_gsd_state(&example_params(id)?)?;
    let global = QubitPartition::first_vs_rest(3)?;
    let rho = qstate::density_of(&psi);
    let pair = |j: usize| rho.partial_trace_factors(&[0, j]);
    match example_measure(id)? {
        MeasureKind::Concurrence => Ok((
            measures::concurrence_pure(&psi, &global)?,
            measures::concurrence_two_qubit(&pair(1)?)?,
            measures::concurrence_two_qubit(&pair(2)?)?,
        )),
        MeasureKind::Eof => Ok((
            measures::eof_pure(&psi, &global)?,
            measures::eof_two_qubit(&pair(1)?)?,
            measures::eof_two_qubit(&pair(2)?)?,
        )),
        MeasureKind::Cren => {
            let cfg = RoofConfig::default();
            Ok((
                measures::negativity(&rho.regroup(vec![2, 4])?, 0)?,
                measures::cren_two_by_d(&pair(1)?, &cfg)?.value,
                measures::cren_two_by_d(&pair(2)?, &cfg)?.value,
            ))
        }
    }
}

/// Regime boundary for the example's measure.
pub(crate) fn boundary_beta(id: u8) -> Result<f64> {
    Ok(match example_measure(id)? {
        MeasureKind::Eof => EOF_BETA_MIN,
        _ => CONCURRENCE_BETA_MIN,
    })
}

/// `(rhs_new, rhs_jzsz)` at `beta` for three-party values `ab ≥ ac`.
pub(crate) fn example_rhs(id: u8, ab: f64, ac: f64, beta: f64) -> Result<(f64, f64)> {
    let inputs = BoundInputs::new(beta, vec![ab, ac], vec![TailValue::exact(ac)]);
    match example_measure(id)? {
        MeasureKind::Concurrence => Ok((
            bounds::rhs_lemma2_concurrence(ab, ac, beta)?.rhs_total,
            bounds::rhs_jzsz_concurrence(ab, ac, beta)?,
        )),
        MeasureKind::Eof => Ok((
            bounds::rhs_eof_thm3(&inputs, ab >= ac)?.rhs_total,
            bounds::rhs_jzsz_eof(ab, ac, beta)?,
        )),
        MeasureKind::Cren => Ok((
            bounds::rhs_cren_thm5(&inputs)?.rhs_total,
            bounds::rhs_jzsz_concurrence(ab, ac, beta)?,
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleCheck {
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ExampleCheck {
    fn near(name: &str, computed: f64, expected: f64, tolerance: f64) -> Self {
        ExampleCheck {
            name: name.to_string(),
            computed,
            expected,
            tolerance,
            pass: (computed - expected).abs() <= tolerance,
        }
    }

    /// Passes when `computed > expected`.
    fn above(name: &str, computed: f64, expected: f64) -> Self {
        ExampleCheck {
            name: name.to_string(),
            computed,
            expected,
            tolerance: 0.0,
            pass: computed > expected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleReport {
    pub id: u8,
    pub measure: MeasureKind,
    pub params: GsdParams,
    pub checks: Vec<ExampleCheck>,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let l = self.params.lambda;
        let mut s = format!(
            "example {} ({}), lambda = [{:.6}, {:.6}, {:.6}, {:.6}, {:.6}]\n",
            self.id,
            self.measure.name(),
            l[0],
            l[1],
            l[2],
            l[3],
            l[4]
        );
        for c in &self.checks {
            s.push_str(&format!(
                "{} {:<34} computed={:<22} expected={:<22} tol={:e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.computed,
                c.expected,
                c.tolerance
            ));
        }
        s
    }
}

fn published_values(id: u8) -> [(&'static str, f64, f64); 3] {
    let c_abc = 2.0 * 14f64.sqrt() / 9.0;
    let c_ab = 2.0 * 10f64.sqrt() / 9.0;
    let c_ac = 4.0 / 9.0;
    match id {
        1 => [("C_A|BC", c_abc, 1e-10), ("C_AB", c_ab, 1e-10), ("C_AC", c_ac, 1e-10)],
        2 => [("E_A|BC", 0.91829, 5e-5), ("E_AB", 0.68193, 5e-5), ("E_AC", 0.40416, 5e-5)],
        _ => [("Nc_A|BC", c_abc, 1e-9), ("Nc_AB", c_ab, 1e-9), ("Nc_AC", c_ac, 1e-9)],
    }
}

/// Rebuilds the example state, compares its measures with the published
/// values, and checks the new bound against the older one over `β ≤ 10`.
pub fn reproduce_example(id: u8) -> Result<ExampleReport> {
    let measure = example_measure(id)?;
    let params = example_params(id)?;
    let (abc, ab, ac) = example_values(id)?;
    let mut checks: Vec<ExampleCheck> = published_values(id)
        .iter()
        .zip([abc, ab, ac])
        .map(|(&(name, want, tol), got)| ExampleCheck::near(name, got, want, tol))
        .collect();

    if id == 3 {
        let (c_abc, c_ab, c_ac) = example_values(1)?;
        checks.push(ExampleCheck::near("Nc_A|BC = C_A|BC", abc, c_abc, 1e-9));
        checks.push(ExampleCheck::near("Nc_AB = C_AB", ab, c_ab, 1e-9));
        checks.push(ExampleCheck::near("Nc_AC = C_AC", ac, c_ac, 1e-9));
    }

    let b0 = boundary_beta(id)?;
    let (new0, old0) = example_rhs(id, ab, ac, b0)?;
    checks.push(ExampleCheck::near("rhs_new - rhs_jzsz at boundary", new0 - old0, 0.0, 1e-12));
    let mut min_gap = f64::INFINITY;
    let mut min_margin = bounds::pow(abc, b0) - new0;
    for k in 1..=GAP_POINTS {
        let beta = b0 + (BETA_TOP - b0) * k as f64 / GAP_POINTS as f64;
        let (new, old) = example_rhs(id, ab, ac, beta)?;
        min_gap = min_gap.min(new - old);
        min_margin = min_margin.min(bounds::pow(abc, beta) - new);
    }
    checks.push(ExampleCheck::above("min rhs_new - rhs_jzsz above boundary", min_gap, 0.0));
    checks.push(ExampleCheck::above("min lhs - rhs_new above boundary", min_margin, 0.0));
    Ok(ExampleReport { id, measure, params, checks })
}
