use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    dipolar_jwt_hamiltonian, pauli_baseline, rydberg_hamiltonian, Boundary, DipolarSpec, Geometry, ModelHamiltonian,
    PauliBaseline, RydbergSpec,
};
use crate::circuit::{count_step, linear_fit, AlphaMode, GateCounts, LinearFit};
use crate::error::{contract, Result};
use crate::lcu::choose_params;

/// A model family parameterized by its size `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelFamily {
    Rydberg {
        geometry: Geometry,
        omega: f64,
        delta: f64,
        c6: f64,
        #[serde(default)]
        seed: u64,
        /// Clustered layouts only: the baseline norm is averaged over this many
        /// loadings with seeds `seed, seed + 1, ...`.
        #[serde(default = "one")]
        loadings: usize,
    },
    Dipolar {
        dims: usize,
        t_h: f64,
        u: f64,
        c_dd: f64,
        dipole: [f64; 3],
        #[serde(default)]
        boundary: Boundary,
    },
}

fn one() -> usize {
    1
}

impl ModelFamily {
    pub fn instance(&self, n: usize) -> Result<ModelHamiltonian> {
        match self {
            ModelFamily::Rydberg {
                geometry,
                omega,
                delta,
                c6,
                seed,
                ..
            } => rydberg_hamiltonian(&RydbergSpec::generate(n, *geometry, *omega, *delta, *c6, *seed)?),
            ModelFamily::Dipolar {
                dims,
                t_h,
                u,
                c_dd,
                dipole,
                boundary,
            } => dipolar_jwt_hamiltonian(&DipolarSpec {
                dims: *dims,
                sites: n,
                t_h: *t_h,
                u: *u,
                c_dd: *c_dd,
                dipole: *dipole,
                boundary: *boundary,
            }),
        }
    }

    /// Pauli baseline of the size-`n` instance; `gamma_prime` is the loading average
    /// for clustered Rydberg families.
    pub fn baseline(&self, n: usize) -> Result<PauliBaseline> {
        let first = pauli_baseline(&self.instance(n)?.pauli);
        let ModelFamily::Rydberg {
            geometry: Geometry::Clustered,
            omega,
            delta,
            c6,
            seed,
            loadings,
        } = self
        else {
            return Ok(first);
        };
        if *loadings == 0 {
            return Err(contract("loadings must be positive"));
        }
        let mut sum = first.gamma_prime;
        for l in 1..*loadings as u64 {
            let spec = RydbergSpec::generate(n, Geometry::Clustered, *omega, *delta, *c6, seed + l)?;
            sum += pauli_baseline(&rydberg_hamiltonian(&spec)?.pauli).gamma_prime;
        }
        Ok(PauliBaseline {
            m_prime: first.m_prime,
            gamma_prime: sum / *loadings as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    #[serde(rename = "N")]
    pub size: usize,
    pub qubits: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub gamma: f64,
    pub delta_e: f64,
    pub delta_e_exact: bool,
    pub r: usize,
    #[serde(rename = "Q")]
    pub q_max: usize,
    pub kappa: u32,
    pub step_gates: GateCounts,
    pub circuit_qubits: usize,
    /// `M * Gamma * t`.
    pub pmr_cost: f64,
    /// `r * (gates per step)`.
    pub gate_cost: f64,
    pub baseline_m: usize,
    pub baseline_gamma: f64,
    /// `M' * Gamma' * t`.
    pub baseline_cost: f64,
    pub dropped_constant: f64,
}

/// Log-log fits of cost against `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFits {
    pub pmr: ScalingFit,
    pub gates: ScalingFit,
    pub baseline: ScalingFit,
}

pub type ScalingFit = LinearFit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceSummary {
    pub family: ModelFamily,
    pub t: f64,
    pub eps: f64,
    pub mode: AlphaMode,
    pub reports: Vec<ResourceReport>,
    pub slopes: SlopeFits,
}

fn log_fit(reports: &[ResourceReport], y: impl Fn(&ResourceReport) -> f64) -> LinearFit {
    let x: Vec<f64> = reports.iter().map(|r| (r.size as f64).ln()).collect();
    let v: Vec<f64> = reports.iter().map(|r| y(r).ln()).collect();
    linear_fit(&x, &v)
}

pub fn resource_report(family: &ModelFamily, sizes: &[usize], t: f64, eps: f64, mode: AlphaMode) -> Result<ResourceSummary> {
    if sizes.len() < 4 {
        return Err(contract(format!("scaling fits need at least 4 sizes, got {}", sizes.len())));
    }
    let mut reports = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let model = family.instance(n)?;
        let h = &model.pmr;
        let p = choose_params(eps, t, h)?;
        let counts = count_step(h, &p, mode)?;
        let base = family.baseline(n)?;
        reports.push(ResourceReport {
            size: n,
            qubits: h.n,
            m: h.m(),
            gamma: h.gamma_total,
            delta_e: h.delta_e,
            delta_e_exact: h.delta_e_exact,
            r: p.r,
            q_max: p.q_max,
            kappa: p.kappa,
            circuit_qubits: counts.qubits,
            pmr_cost: h.m() as f64 * h.gamma_total * t,
            gate_cost: p.r as f64 * counts.step.total as f64,
            step_gates: counts.step,
            baseline_m: base.m_prime,
            baseline_gamma: base.gamma_prime,
            baseline_cost: base.m_prime as f64 * base.gamma_prime * t,
            dropped_constant: model.dropped_constant,
        });
    }
    let slopes = SlopeFits {
        pmr: log_fit(&reports, |r| r.pmr_cost),
        gates: log_fit(&reports, |r| r.gate_cost),
        baseline: log_fit(&reports, |r| r.baseline_cost),
    };
    Ok(ResourceSummary {
        family: family.clone(),
        t,
        eps,
        mode,
        reports,
        slopes,
    })
}

/// Aligned-column table of a summary, followed by the fitted slopes.
pub fn format_table(s: &ResourceSummary) -> String {
    let head = [
        "N", "qubits", "M", "Gamma", "dE", "r", "Q", "kappa", "gates/step", "M*Gamma*t", "r*gates", "M'", "Gamma'", "M'*Gamma'*t",
    ];
    let rows: Vec<Vec<String>> = s
        .reports
        .iter()
        .map(|r| {
            let de = if r.delta_e_exact { format!("{:.4}", r.delta_e) } else { format!("<={:.4}", r.delta_e) };
            vec![
                r.size.to_string(),
                r.qubits.to_string(),
                r.m.to_string(),
                format!("{:.4}", r.gamma),
                de,
                r.r.to_string(),
                r.q_max.to_string(),
                r.kappa.to_string(),
                r.step_gates.total.to_string(),
                format!("{:.4e}", r.pmr_cost),
                format!("{:.4e}", r.gate_cost),
                r.baseline_m.to_string(),
                format!("{:.4}", r.baseline_gamma),
                format!("{:.4e}", r.baseline_cost),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..head.len())
        .map(|c| rows.iter().map(|r| r[c].len()).chain([head[c].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |out: &mut String, cells: &[&str]| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  "));
    };
    line(&mut out, &head);
    for r in &rows {
        line(&mut out, &r.iter().map(String::as_str).collect::<Vec<_>>());
    }
    for (name, f) in [("M*Gamma*t", s.slopes.pmr), ("r*gates", s.slopes.gates), ("M'*Gamma'*t", s.slopes.baseline)] {
        let _ = writeln!(out, "slope {name:<12} {:.4}  (R^2 {:.4})", f.slope, f.r_squared);
    }
    out
}
