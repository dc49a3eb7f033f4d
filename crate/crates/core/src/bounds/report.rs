use std::collections::BTreeMap;
use std::thread;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::baselines::{nuclear_norm, numerical_rank, RANK_REL_TOL};
use super::certificate::round_certificate;
use super::cover::{rectangle_cover_exact, CoverLimits};
use crate::error::{Error, Result};
use crate::matrix::{weighted_gram_trace, NonnegMatrix};
use crate::relaxations::{solve_relaxation, RelaxationResult, RelaxationSpec};
use crate::solver::{SolveStatus, SolverSettings};

/// Slack subtracted before taking the ceiling of the best bound.
pub const CEIL_SLACK: f64 = 1e-6;

/// `ceil(x - 1e-6)`.
pub fn best_integer(x: f64) -> u64 {
    (x - CEIL_SLACK).ceil().max(0.0) as u64
}

/// Value of one relaxation and the rank bound it implies.
#[derive(Debug, Clone)]
pub struct NuPlusBound {
    pub level: usize,
    pub value: f64,
    /// `(value / denominator)^2`, with `denominator = ||A||_F` or
    /// `sqrt(tr(A^T P A Q))` when weighted.
    pub ratio: f64,
    pub denominator: f64,
    /// Rounded certificate value; level 0 only.
    pub certified_value: Option<f64>,
    pub result: RelaxationResult,
}

impl NuPlusBound {
    pub fn status(&self) -> SolveStatus {
        self.result.solution.status
    }

    pub fn certified_ratio(&self) -> Option<f64> {
        self.certified_value
            .map(|v| (v.max(0.0) / self.denominator).powi(2))
    }
}

/// Solves the relaxation in `spec` and turns it into a rank bound.
///
/// Non-convergence is not an error: the value is kept and
/// [`NuPlusBound::status`] says it is not rigorous.
pub fn nu_plus_bound(
    a: &NonnegMatrix,
    spec: &RelaxationSpec,
    settings: &SolverSettings,
) -> Result<NuPlusBound> {
    let denominator = match &spec.weights {
        Some((p, q)) => weighted_gram_trace(a, p, q)?.sqrt(),
        None => a.frobenius_norm(),
    };
    let result = solve_relaxation(a, spec, settings)?;
    let certified_value = match &result.certificate {
        Some(cert) => Some(round_certificate(a, cert)?.certified_value),
        None => None,
    };
    Ok(NuPlusBound {
        level: result.level,
        value: result.value,
        ratio: (result.value / denominator).powi(2),
        denominator,
        certified_value,
        result,
    })
}

#[derive(Debug, Clone, Default)]
pub struct ReportOptions {
    /// Level and weights; level 0 is always solved as well.
    pub spec: RelaxationSpec,
    pub settings: SolverSettings,
    pub cover_limits: CoverLimits,
    pub timestamp: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBounds {
    pub rank: usize,
    pub nuclear_ratio: f64,
    pub nu_plus_0_ratio: f64,
    /// `nu_plus_<k>_ratio` for requested levels above 0.
    #[serde(flatten)]
    pub higher_levels: BTreeMap<String, f64>,
    /// `None` when the exact cover was refused as too large.
    pub rectangle_cover: Option<usize>,
}

impl LowerBounds {
    pub fn values(&self) -> Vec<(String, f64)> {
        let mut out = vec![
            ("rank".to_string(), self.rank as f64),
            ("nuclear_ratio".to_string(), self.nuclear_ratio),
            ("nu_plus_0_ratio".to_string(), self.nu_plus_0_ratio),
        ];
        out.extend(self.higher_levels.iter().map(|(k, v)| (k.clone(), *v)));
        if let Some(c) = self.rectangle_cover {
            out.push(("rectangle_cover".to_string(), c as f64));
        }
        out
    }
}

/// Every lower bound on `rank_+(A)` computed for one matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub m: usize,
    pub n: usize,
    pub frobenius: f64,
    pub nuclear: f64,
    /// Relaxation values keyed by level.
    pub nu_plus: BTreeMap<String, f64>,
    /// Rounded level-0 certificate value, a proven lower bound on `nu_+`.
    pub certified_value: f64,
    pub bounds: LowerBounds,
    pub best_integer_bound: u64,
    /// Worst solver status over the relaxations solved.
    pub status: String,
    pub weighted: bool,
    /// `(certified_value / denominator)^2`.
    pub certified_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cover_note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl BoundReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Optimal.as_str()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn status_rank(s: SolveStatus) -> u8 {
    match s {
        SolveStatus::Optimal => 0,
        SolveStatus::MaxIter => 1,
        SolveStatus::InfeasibleSuspected => 2,
    }
}

/// Computes the full report, running the rectangle cover alongside the
/// relaxations.
pub fn bound_report(a: &NonnegMatrix, opts: &ReportOptions) -> Result<BoundReport> {
    let (cover, relaxations) = thread::scope(|s| {
        let cover = s.spawn(|| rectangle_cover_exact(a, &opts.cover_limits));
        let base = RelaxationSpec {
            level: 0,
            ..opts.spec.clone()
        };
        let mut runs = vec![nu_plus_bound(a, &base, &opts.settings)];
        if opts.spec.level > 0 {
            runs.push(nu_plus_bound(a, &opts.spec, &opts.settings));
        }
        (cover.join().expect("cover thread"), runs)
    });
    let relaxations = relaxations.into_iter().collect::<Result<Vec<_>>>()?;
    let (rectangle_cover, cover_note) = match cover {
        Ok(c) => (Some(c.count()), None),
        Err(Error::CoverTooLarge(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };

    let level0 = &relaxations[0];
    let mut nu_plus = BTreeMap::new();
    let mut higher_levels = BTreeMap::new();
    for r in &relaxations {
        nu_plus.insert(r.level.to_string(), r.value);
        if r.level > 0 {
            higher_levels.insert(format!("nu_plus_{}_ratio", r.level), r.ratio);
        }
    }
    let worst = relaxations
        .iter()
        .map(NuPlusBound::status)
        .max_by_key(|s| status_rank(*s))
        .unwrap_or(SolveStatus::Optimal);

    let nuclear = nuclear_norm(a);
    let frobenius = a.frobenius_norm();
    let bounds = LowerBounds {
        rank: numerical_rank(a, RANK_REL_TOL),
        nuclear_ratio: (nuclear / frobenius).powi(2),
        nu_plus_0_ratio: level0.ratio,
        higher_levels,
        rectangle_cover,
    };
    // Level 0 enters through its rounded certificate; higher levels have no
    // certificate and count only when converged.
    let certified_ratio = level0.certified_ratio().unwrap_or(0.0);
    let mut best = bounds.rank as f64;
    best = best.max(bounds.nuclear_ratio);
    best = best.max(rectangle_cover.unwrap_or(0) as f64);
    best = best.max(certified_ratio);
    for r in relaxations.iter().skip(1) {
        if r.status() == SolveStatus::Optimal {
            best = best.max(r.ratio);
        }
    }
    let timestamp = opts.timestamp.then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    Ok(BoundReport {
        m: a.rows(),
        n: a.cols(),
        frobenius,
        nuclear,
        nu_plus,
        certified_value: level0.certified_value.unwrap_or(0.0),
        bounds,
        best_integer_bound: best_integer(best),
        status: worst.as_str().to_string(),
        weighted: opts.spec.weights.is_some(),
        certified_ratio,
        cover_note,
        timestamp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceiling_slack() {
        assert_eq!(best_integer(3.9999993), 4);
        assert_eq!(best_integer(3.0000004), 3);
        assert_eq!(best_integer(3.2), 4);
        assert_eq!(best_integer(4.0), 4);
    }

    #[test]
    fn key_order() {
        let a = NonnegMatrix::new(crate::DenseMatrix::identity(2)).unwrap();
        let report = bound_report(&a, &ReportOptions::default()).unwrap();
        let json = report.to_json().unwrap();
        let keys = [
            "\"m\"",
            "\"n\"",
            "\"frobenius\"",
            "\"nuclear\"",
            "\"nu_plus\"",
            "\"certified_value\"",
            "\"bounds\"",
            "\"best_integer_bound\"",
        ];
        let pos: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{json}");
        let inner = [
            "\"rank\"",
            "\"nuclear_ratio\"",
            "\"nu_plus_0_ratio\"",
            "\"rectangle_cover\"",
        ];
        let pos: Vec<usize> = inner.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{json}");
        assert_eq!(report.best_integer_bound, 2);
        assert!(!json.contains("timestamp"));
    }
}
