use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::examples::{boundary_beta, example_measure, example_params, example_rhs, example_values};
use crate::bounds::{pow, ORDER_SLACK};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FigureSpec {
    pub id: u8,
    pub beta_min: f64,
    pub beta_max: f64,
    pub steps: usize,
}

impl FigureSpec {
    /// The full plotted range: `[4, 10]` for figures 1 and 3, `[2√2, 10]` for figure 2.
    pub fn full_range(id: u8, steps: usize) -> Result<Self> {
        Ok(FigureSpec { id, beta_min: boundary_beta(id)?, beta_max: 10.0, steps })
    }

    fn validate(&self) -> Result<()> {
        let floor = boundary_beta(self.id)?;
        if !(self.beta_min.is_finite() && self.beta_max.is_finite()) {
            return Err(Error::Config("beta range must be finite".into()));
        }
        if self.beta_min < floor - ORDER_SLACK {
            return Err(Error::Config(format!(
                "beta-min {} is below {floor} for figure {}",
                self.beta_min, self.id
            )));
        }
        if self.beta_max <= self.beta_min {
            return Err(Error::Config("beta-max must exceed beta-min".into()));
        }
        if self.steps < 2 {
            return Err(Error::Config("steps must be >= 2".into()));
        }
        Ok(())
    }

    /// Uniform grid over the closed range; the last point is exactly `beta_max`.
    pub fn grid(&self) -> Vec<f64> {
        let span = self.beta_max - self.beta_min;
        let last = self.steps - 1;
        (0..self.steps)
            .map(|k| {
                if k == last {
                    self.beta_max
                } else {
                    self.beta_min + span * k as f64 / last as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FigureRow {
    pub beta: f64,
    pub lhs: f64,
    pub rhs_new: f64,
    pub rhs_jzsz: f64,
}

pub fn figure_rows(spec: &FigureSpec) -> Result<Vec<FigureRow>> {
    spec.validate()?;
    let (abc, ab, ac) = example_values(spec.id)?;
    spec.grid()
        .into_iter()
        .map(|beta| {
            let (rhs_new, rhs_jzsz) = example_rhs(spec.id, ab, ac, beta)?;
            Ok(FigureRow { beta, lhs: pow(abc, beta), rhs_new, rhs_jzsz })
        })
        .collect()
}

/// Writes the `#` parameter line, the header and one line per row.
pub fn write_figure_csv(spec: &FigureSpec, rows: &[FigureRow], out: &mut impl Write) -> Result<()> {
    let p = example_params(spec.id)?;
    let l = p.lambda;
    writeln!(
        out,
        "# figure={} measure={} state=gsd lambda={},{},{},{},{} phi={} grid=uniform-closed beta_min={} beta_max={} steps={}",
        spec.id,
        example_measure(spec.id)?.name(),
        l[0],
        l[1],
        l[2],
        l[3],
        l[4],
        p.phi,
        spec.beta_min,
        spec.beta_max,
        spec.steps
    )?;
    writeln!(out, "beta,lhs,rhs_new,rhs_jzsz")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.beta, r.lhs, r.rhs_new, r.rhs_jzsz)?;
    }
    Ok(())
}

pub fn emit_figure_data(spec: &FigureSpec, out: &Path) -> Result<Vec<FigureRow>> {
    let rows = figure_rows(spec)?;
    let mut buf = Vec::new();
    write_figure_csv(spec, &rows, &mut buf)?;
    std::fs::write(out, buf)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let spec = FigureSpec { id: 2, beta_min: 2.0 * std::f64::consts::SQRT_2, beta_max: 10.0, steps: 7 };
        let g = spec.grid();
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], spec.beta_min);
        assert_eq!(g[6], 10.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_bad_ranges() {
        let bad = |id, lo, hi, steps| figure_rows(&FigureSpec { id, beta_min: lo, beta_max: hi, steps }).is_err();
        assert!(bad(1, 3.0, 10.0, 10));
        assert!(bad(2, 2.5, 10.0, 10));
        assert!(bad(1, 5.0, 5.0, 10));
        assert!(bad(1, 4.0, 10.0, 1));
        assert!(bad(4, 4.0, 10.0, 10));
    }

    #[test]
    fn csv_layout() {
        let spec = FigureSpec::full_range(1, 3).unwrap();
        let rows = figure_rows(&spec).unwrap();
        let mut buf = Vec::new();
        write_figure_csv(&spec, &rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# figure=1"));
        assert_eq!(lines[1], "beta,lhs,rhs_new,rhs_jzsz");
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("4,"));
        assert!(lines[4].starts_with("10,"));
    }
}
