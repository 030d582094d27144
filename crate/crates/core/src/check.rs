//! Self-consistency checks of one automaton against the oracles.

use std::fmt;

use crate::error::{Error, Result};
use crate::oracle::{
    brute_weight, fd_gradient, fixed_point_rhs, subgradient_reference, Param, DEFAULT_MAX_PATHS,
};
use crate::semiring::{close, cotangent_close, elem_close, Cotangent, Semiring};
use crate::tape::record_weight;
use crate::wfsa::{topological_sort, Automaton, Forward};

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CheckReport {
    pub rows: Vec<CheckRow>,
}

impl CheckReport {
    /// True when no row failed. Skipped rows do not count as failures.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status != Status::Fail)
    }

    fn push(&mut self, name: &'static str, status: Status, detail: impl Into<String>) {
        self.rows.push(CheckRow {
            name,
            status,
            detail: detail.into(),
        });
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<12} {:<8} detail", "check", "status")?;
        for r in &self.rows {
            writeln!(f, "{:<12} {:<8} {}", r.name, r.status.to_string(), r.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub max_paths: usize,
    /// Relative tolerance for the forward checks.
    pub value_tol: f64,
    /// Relative tolerance against finite differences.
    pub fd_tol: f64,
    /// Relative tolerance against the tape.
    pub tape_tol: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            max_paths: DEFAULT_MAX_PATHS,
            value_tol: 1e-9,
            fd_tol: 1e-5,
            tape_tol: 1e-10,
        }
    }
}

/// Runs the fixed-point, brute-force, gradient and tape checks.
///
/// Fails only on structural errors (e.g. a cycle); disagreements are
/// reported as failed rows.
pub fn run_checks<S: Semiring>(a: &Automaton<S>, opts: &CheckOptions) -> Result<CheckReport> {
    let (a, _) = topological_sort(a)?;
    let s = a.semiring();
    let fwd = Forward::evaluate(&a)?;
    let mut report = CheckReport::default();

    let rhs = fixed_point_rhs(&fwd.matrix.transitions, &fwd.matrix.alpha, &fwd.distances);
    let bad = rhs
        .iter()
        .zip(fwd.distances.as_slice())
        .filter(|(x, y)| !elem_close(s, **x, **y, opts.value_tol))
        .count();
    report.push(
        "fixed-point",
        if bad == 0 { Status::Pass } else { Status::Fail },
        format!("{bad} of {} states differ", rhs.len()),
    );

    match brute_weight(&a, opts.max_paths) {
        Ok(b) => {
            let ok = elem_close(s, b, fwd.nu, opts.value_tol);
            report.push(
                "brute-force",
                if ok { Status::Pass } else { Status::Fail },
                format!("nu = {}, paths give {}", s.format_elem(fwd.nu), s.format_elem(b)),
            );
        }
        Err(Error::PathExplosion { limit }) => {
            report.push("brute-force", Status::Skipped, format!("more than {limit} paths"))
        }
        Err(e) => return Err(e),
    }

    let seeds: Vec<_> = (0..S::Cotangent::DIM)
        .map(|o| fwd.backward(&a, S::Cotangent::unit(o)))
        .collect::<Result<_>>()?;
    let params = Param::all(&a);
    let counted = s.tie_count(s.one()).is_some();

    let mut compared = 0usize;
    let mut skipped = 0usize;
    let mut failures = Vec::new();
    for &p in &params {
        for (o, g) in seeds.iter().enumerate() {
            let analytic = match p {
                Param::Initial(q) => g.grad_initial[q],
                Param::Final(q) => g.grad_final[q],
                Param::Arc(e) => g.grad_arcs[e],
            };
            for k in 0..S::Cotangent::DIM {
                let reference = match fd_gradient(&a, p, k, o, None) {
                    Ok(est) => Some(est.central),
                    Err(Error::TieWarning(_)) if counted => {
                        match subgradient_reference(&a, p, opts.max_paths) {
                            Ok(v) => Some(v),
                            Err(Error::PathExplosion { .. }) => None,
                            Err(e) => return Err(e),
                        }
                    }
                    Err(Error::Domain(_)) | Err(Error::TieWarning(_)) => None,
                    Err(e) => return Err(e),
                };
                match reference {
                    Some(r) => {
                        compared += 1;
                        if !close(analytic.coord(k), r, opts.fd_tol) {
                            failures.push(format!(
                                "{p:?}[{k}] seed {o}: {} vs {r}",
                                analytic.coord(k)
                            ));
                        }
                    }
                    None => skipped += 1,
                }
            }
        }
    }
    let status = if !failures.is_empty() {
        Status::Fail
    } else if compared == 0 {
        Status::Skipped
    } else {
        Status::Pass
    };
    let mut detail = format!("{compared} coordinates compared, {skipped} skipped");
    if let Some(first) = failures.first() {
        detail.push_str(&format!(", {} mismatches (first: {first})", failures.len()));
    }
    report.push("gradient", status, detail);

    let rec = record_weight(&a)?;
    let mut bad = usize::from(!elem_close(s, rec.nu, fwd.nu, opts.tape_tol));
    for (o, g) in seeds.iter().enumerate() {
        let t = rec.gradients(S::Cotangent::unit(o))?;
        let pairs = t
            .grad_initial
            .iter()
            .zip(&g.grad_initial)
            .chain(t.grad_final.iter().zip(&g.grad_final))
            .chain(t.grad_arcs.iter().zip(&g.grad_arcs));
        bad += pairs
            .filter(|(x, y)| !cotangent_close(**x, **y, opts.tape_tol))
            .count();
    }
    report.push(
        "tape",
        if bad == 0 { Status::Pass } else { Status::Fail },
        format!("{bad} mismatches over {} tape nodes", rec.tape.node_count()),
    );
    Ok(report)
}
