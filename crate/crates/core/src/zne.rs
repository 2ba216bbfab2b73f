//! Zero-noise extrapolation by controlled-phase folding.
//!
//! Every CZ in a circuit is replaced by an odd number of copies: the unitary
//! is unchanged (CZ is an involution) while each copy carries its own noise,
//! so the measured energy traces out a curve against the fold factor that a
//! polynomial fit extrapolates back to the zero-noise point. Each folded
//! point can be estimated bare (plain ⟨H⟩) or through the full Krylov
//! pipeline, and [`budget_matched_compare`] pits extrapolation against the
//! moment method at equal-or-greater measurement cost.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::invert_real;
use crate::mitigation::{
    bare_estimate, lanczos_general, lanczos_order2, measure_moments, BootstrapCfg,
    MitigatedEstimate,
};
use crate::pauli::{PauliSum, DEFAULT_PRUNE_TOL};
use crate::seeds::split_seed;
use crate::sim::{run_circuit, Circuit, NoiseModel, ShotCount, ShotEstimate};

/// How each folded point is turned into an energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZneEstimator {
    /// Plain ⟨H⟩ on the folded state.
    Bare,
    /// Krylov ground-energy estimate of the given order on the folded state.
    Lanczos { order: usize },
}

/// Folding-experiment parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZneConfig {
    /// CZ copy counts per point; odd and strictly increasing.
    pub fold_factors: Vec<usize>,
    /// Polynomial degree of the extrapolation fit.
    pub degree: usize,
    /// Shots per measured Pauli string at each point.
    pub shots: ShotCount,
    /// Minimum extra-shot factor granted to each point in the
    /// budget-matched comparison.
    pub shot_multiplier: u64,
}

impl Default for ZneConfig {
    fn default() -> Self {
        ZneConfig {
            fold_factors: vec![1, 3, 5, 7],
            degree: 1,
            shots: ShotCount::Exact,
            shot_multiplier: 2,
        }
    }
}

impl ZneConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fold_factors.is_empty() {
            return Err(Error::InvalidParameter("no fold factors".into()));
        }
        for &f in &self.fold_factors {
            if f % 2 == 0 {
                return Err(Error::InvalidParameter(format!(
                    "fold factors must be odd, got {f}"
                )));
            }
        }
        if !self.fold_factors.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "fold factors must be strictly increasing".into(),
            ));
        }
        if self.degree == 0 {
            return Err(Error::InvalidParameter(
                "fit degree must be at least 1".into(),
            ));
        }
        if self.fold_factors.len() <= self.degree {
            return Err(Error::InvalidParameter(format!(
                "a degree-{} fit needs more than {} fold factors",
                self.degree, self.degree
            )));
        }
        if self.shot_multiplier == 0 {
            return Err(Error::InvalidParameter(
                "shot multiplier must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn with_fold_factors(mut self, factors: &[usize]) -> Self {
        self.fold_factors = factors.to_vec();
        self
    }

    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = degree;
        self
    }

    pub fn with_shots(mut self, shots: ShotCount) -> Self {
        self.shots = shots;
        self
    }

    /// Switch to a maximal-degree fit (one fewer than the point count),
    /// which interpolates the points exactly.
    pub fn richardson(mut self) -> Self {
        self.degree = self.fold_factors.len().saturating_sub(1);
        self
    }
}

/// One folded measurement.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ZnePoint {
    pub factor: usize,
    pub estimate: MitigatedEstimate,
}

/// Measure the energy of `h` on the circuit at every fold factor.
///
/// Per factor: clone the circuit with the fold applied, simulate it under
/// `noise`, and run the chosen estimator with an independent derived seed.
/// The circuit must contain at least one CZ, otherwise folding changes
/// nothing and the extrapolation abscissa is meaningless.
pub fn fold_and_measure(
    circuit: &Circuit,
    h: &PauliSum,
    noise: Option<&NoiseModel>,
    cfg: &ZneConfig,
    estimator: ZneEstimator,
    seed: u64,
) -> Result<Vec<ZnePoint>> {
    cfg.validate()?;
    if circuit.n_cz() == 0 {
        return Err(Error::InvalidParameter(
            "folding needs at least one CZ in the circuit".into(),
        ));
    }
    if let ZneEstimator::Lanczos { order } = estimator {
        if order == 0 {
            return Err(Error::InvalidParameter(
                "Krylov order must be at least 1".into(),
            ));
        }
    }
    let readout = noise.map_or(&[][..], |n| n.readout.as_slice());
    let mut points = Vec::with_capacity(cfg.fold_factors.len());
    for (i, &factor) in cfg.fold_factors.iter().enumerate() {
        let folded = circuit.with_cz_fold(factor)?;
        let rho = run_circuit(&folded, noise)?;
        let point_seed = split_seed(seed, i as u64);
        let estimate = match estimator {
            ZneEstimator::Bare => {
                let ms = measure_moments(&rho, h, 1, cfg.shots, readout, point_seed)?;
                bare_estimate(&ms)
            }
            ZneEstimator::Lanczos { order } => {
                let ms =
                    measure_moments(&rho, h, 2 * order - 1, cfg.shots, readout, point_seed)?;
                // Moment streams start at index 1, so the bootstrap's
                // stream 0 is free to share the point seed.
                let boot = BootstrapCfg::new(point_seed);
                if order == 2 {
                    lanczos_order2(&ms, &boot)?
                } else {
                    lanczos_general(&ms, order, &boot)?
                }
            }
        };
        points.push(ZnePoint { factor, estimate });
    }
    Ok(points)
}

/// Weighted least-squares polynomial fit; returns the value at abscissa 0.
///
/// Weights are σ⁻² per point; the returned stderr is the square root of the
/// intercept entry of the fit covariance (XᵀWX)⁻¹. When every point is
/// exact the fit is unweighted and the intercept is reported exact. Mixing
/// exact and finite-error points has no consistent weighting and is
/// rejected.
pub fn extrapolate(points: &[(f64, ShotEstimate)], degree: usize) -> Result<ShotEstimate> {
    let n = points.len();
    if n <= degree {
        return Err(Error::InvalidParameter(format!(
            "a degree-{degree} fit needs more than {degree} points, got {n}"
        )));
    }
    let all_exact = points.iter().all(|(_, e)| e.stderr == 0.0);
    if !all_exact && points.iter().any(|(_, e)| e.stderr == 0.0) {
        return Err(Error::InvalidParameter(
            "cannot mix exact and finite-error points in one fit".into(),
        ));
    }
    let k = degree + 1;
    let mut xtwx = Array2::<f64>::zeros((k, k));
    let mut xtwy = vec![0.0; k];
    for &(x, est) in points {
        let w = if all_exact {
            1.0
        } else {
            1.0 / (est.stderr * est.stderr)
        };
        let mut pow = vec![1.0; k];
        for j in 1..k {
            pow[j] = pow[j - 1] * x;
        }
        for i in 0..k {
            for j in 0..k {
                xtwx[[i, j]] += w * pow[i] * pow[j];
            }
            xtwy[i] += w * pow[i] * est.value;
        }
    }
    let cov = invert_real(&xtwx).map_err(|_| {
        Error::Numerical("degenerate design matrix in the extrapolation fit".into())
    })?;
    let mut intercept = 0.0;
    for j in 0..k {
        intercept += cov[[0, j]] * xtwy[j];
    }
    let stderr = if all_exact { 0.0 } else { cov[[0, 0]].sqrt() };
    Ok(ShotEstimate {
        value: intercept,
        stderr,
        shots: points[0].1.shots,
    })
}

/// [`extrapolate`] applied to the output of [`fold_and_measure`].
pub fn extrapolate_points(points: &[ZnePoint], degree: usize) -> Result<ShotEstimate> {
    let pairs: Vec<(f64, ShotEstimate)> = points
        .iter()
        .map(|p| (p.factor as f64, p.estimate.energy))
        .collect();
    extrapolate(&pairs, degree)
}

/// Measurement-cost ledger for one moment-method-vs-folding comparison.
///
/// String counts are non-identity Pauli strings (identity terms cost no
/// shots). `zne_shots_per_string` already includes the multiplier.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MeasurementBudget {
    /// Strings across H, H², …, H^(2m−1) for the order-m moment method.
    pub lanczos_strings: usize,
    /// Strings of H times the number of fold factors.
    pub zne_strings: usize,
    pub shots_per_string: u64,
    pub zne_shots_per_string: u64,
}

impl MeasurementBudget {
    pub fn lanczos_total(&self) -> u64 {
        self.lanczos_strings as u64 * self.shots_per_string
    }

    pub fn zne_total(&self) -> u64 {
        self.zne_strings as u64 * self.zne_shots_per_string
    }
}

/// Non-identity string count summed over H¹ … H^max_power.
pub fn moment_string_count(h: &PauliSum, max_power: u32) -> Result<usize> {
    let powers = h.powers_up_to(max_power, DEFAULT_PRUNE_TOL)?;
    Ok(powers
        .iter()
        .skip(1)
        .map(|p| p.n_non_identity_terms())
        .sum())
}

/// Repeated-ensemble comparison of the two estimators at matched cost.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BudgetComparison {
    pub budget: MeasurementBudget,
    pub lanczos_mean: f64,
    pub lanczos_std: f64,
    pub zne_mean: f64,
    pub zne_std: f64,
    pub n_reps: usize,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Run the order-2 moment pipeline and budget-matched extrapolation side by
/// side, `n_reps` times each with independent seeds.
///
/// The moment side measures H, H², H³ on the unfolded circuit at
/// `cfg.shots` per string. The extrapolation side measures H alone at every
/// fold factor and is granted at least `cfg.shot_multiplier`× the shots per
/// string — raised further if needed so its total budget is never below the
/// moment method's.
pub fn budget_matched_compare(
    circuit: &Circuit,
    h: &PauliSum,
    noise: Option<&NoiseModel>,
    cfg: &ZneConfig,
    n_reps: usize,
    seed: u64,
) -> Result<BudgetComparison> {
    cfg.validate()?;
    if n_reps == 0 {
        return Err(Error::InvalidParameter("n_reps must be positive".into()));
    }
    let lanczos_strings = moment_string_count(h, 3)?;
    let zne_strings = cfg.fold_factors.len() * h.n_non_identity_terms();
    if zne_strings == 0 {
        return Err(Error::InvalidParameter(
            "operator has no non-identity strings to measure".into(),
        ));
    }
    let multiplier = cfg
        .shot_multiplier
        .max((lanczos_strings as u64).div_ceil(zne_strings as u64));
    let shots_per_string = match cfg.shots {
        ShotCount::Exact => 0,
        ShotCount::Finite(s) => s,
    };
    let budget = MeasurementBudget {
        lanczos_strings,
        zne_strings,
        shots_per_string,
        zne_shots_per_string: shots_per_string * multiplier,
    };

    let readout = noise.map_or(&[][..], |n| n.readout.as_slice());
    let rho = run_circuit(circuit, noise)?;
    let zne_cfg = ZneConfig {
        shots: cfg.shots.scaled(multiplier),
        ..cfg.clone()
    };
    let mut lanczos_vals = Vec::with_capacity(n_reps);
    let mut zne_vals = Vec::with_capacity(n_reps);
    for rep in 0..n_reps {
        let rep_seed = split_seed(seed, rep as u64);
        let ms = measure_moments(&rho, h, 3, cfg.shots, readout, split_seed(rep_seed, 0))?;
        let boot = BootstrapCfg::new(split_seed(rep_seed, 1));
        lanczos_vals.push(lanczos_order2(&ms, &boot)?.energy.value);
        let points = fold_and_measure(
            circuit,
            h,
            noise,
            &zne_cfg,
            ZneEstimator::Bare,
            split_seed(rep_seed, 2),
        )?;
        zne_vals.push(extrapolate_points(&points, cfg.degree)?.value);
    }
    let (lanczos_mean, lanczos_std) = mean_std(&lanczos_vals);
    let (zne_mean, zne_std) = mean_std(&zne_vals);
    Ok(BudgetComparison {
        budget,
        lanczos_mean,
        lanczos_std,
        zne_mean,
        zne_std,
        n_reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::build_triplet_pair;
    use crate::pauli::PauliTerm;
    use crate::seeds::rng_for;
    use crate::sim::exact_expectation;
    use num_complex::Complex64;
    use rand::Rng;
    use rand_distr::StandardNormal;

    /// Two-qubit operator with four distinct eigenvalues, so an order-2
    /// Krylov estimate does not saturate and folding leaves real bias.
    fn four_level_operator() -> PauliSum {
        PauliSum::from_terms(
            2,
            [
                PauliTerm::from_label("ZZ", Complex64::new(1.0, 0.0)).unwrap(),
                PauliTerm::from_label("ZI", Complex64::new(0.7, 0.0)).unwrap(),
                PauliTerm::from_label("IX", Complex64::new(0.3, 0.0)).unwrap(),
            ],
        )
        .unwrap()
    }

    fn two_qubit_circuit() -> Circuit {
        let mut c = Circuit::new(2).unwrap();
        c.ry(0, 0.7).unwrap();
        c.ry(1, -0.4).unwrap();
        c.cz(0, 1).unwrap();
        c.ry(0, 0.3).unwrap();
        c.rz(1, 1.1).unwrap();
        c
    }

    #[test]
    fn config_validation_rejects_bad_shapes() {
        assert!(ZneConfig::default().validate().is_ok());
        let even = ZneConfig::default().with_fold_factors(&[1, 2, 5]);
        assert!(even.validate().is_err());
        let decreasing = ZneConfig::default().with_fold_factors(&[1, 5, 3]);
        assert!(decreasing.validate().is_err());
        let repeated = ZneConfig::default().with_fold_factors(&[1, 3, 3, 7]);
        assert!(repeated.validate().is_err());
        let flat = ZneConfig::default().with_degree(0);
        assert!(flat.validate().is_err());
        let underdetermined = ZneConfig::default().with_fold_factors(&[1, 3]).with_degree(2);
        assert!(underdetermined.validate().is_err());
        assert_eq!(ZneConfig::default().richardson().degree, 3);
    }

    #[test]
    fn noiseless_folding_leaves_the_energy_alone() {
        let h = build_triplet_pair();
        let circuit = two_qubit_circuit();
        let cfg = ZneConfig::default();
        let points =
            fold_and_measure(&circuit, &h, None, &cfg, ZneEstimator::Bare, 7).unwrap();
        assert_eq!(points.len(), 4);
        let e0 = points[0].estimate.energy.value;
        for p in &points {
            assert!(
                (p.estimate.energy.value - e0).abs() < 1e-10,
                "fold {} drifted: {} vs {}",
                p.factor,
                p.estimate.energy.value,
                e0
            );
        }
    }

    #[test]
    fn folding_requires_a_cz() {
        let h = build_triplet_pair();
        let mut c = Circuit::new(2).unwrap();
        c.ry(0, 0.5).unwrap();
        let cfg = ZneConfig::default();
        assert!(fold_and_measure(&c, &h, None, &cfg, ZneEstimator::Bare, 0).is_err());
    }

    #[test]
    fn exact_linear_data_extrapolates_to_the_intercept() {
        let points: Vec<(f64, ShotEstimate)> = [
            (1.0, -0.95),
            (3.0, -0.85),
            (5.0, -0.75),
            (7.0, -0.65),
        ]
        .iter()
        .map(|&(x, y)| (x, ShotEstimate::exact(y)))
        .collect();
        let fit = extrapolate(&points, 1).unwrap();
        assert!((fit.value - (-1.0)).abs() < 1e-12, "intercept {}", fit.value);
        assert_eq!(fit.stderr, 0.0);
    }

    #[test]
    fn constant_data_fits_a_flat_line() {
        let points: Vec<(f64, ShotEstimate)> = [1.0, 3.0, 5.0, 7.0]
            .iter()
            .map(|&x| (x, ShotEstimate::exact(-0.5)))
            .collect();
        let fit = extrapolate(&points, 1).unwrap();
        assert!((fit.value - (-0.5)).abs() < 1e-12);
    }

    #[test]
    fn exact_quadratic_data_is_recovered_by_a_quadratic_fit() {
        let f = |x: f64| 0.25 - 0.3 * x + 0.02 * x * x;
        let points: Vec<(f64, ShotEstimate)> = [1.0, 3.0, 5.0, 7.0, 9.0]
            .iter()
            .map(|&x| (x, ShotEstimate::exact(f(x))))
            .collect();
        let fit = extrapolate(&points, 2).unwrap();
        assert!((fit.value - 0.25).abs() < 1e-10, "intercept {}", fit.value);
    }

    #[test]
    fn fit_rejects_short_or_mixed_input() {
        let two: Vec<(f64, ShotEstimate)> = vec![
            (1.0, ShotEstimate::exact(0.0)),
            (3.0, ShotEstimate::exact(1.0)),
        ];
        assert!(extrapolate(&two, 2).is_err());
        let mixed = vec![
            (1.0, ShotEstimate::exact(0.0)),
            (
                3.0,
                ShotEstimate {
                    value: 1.0,
                    stderr: 0.1,
                    shots: ShotCount::Finite(100),
                },
            ),
            (5.0, ShotEstimate::exact(2.0)),
        ];
        assert!(extrapolate(&mixed, 1).is_err());
    }

    #[test]
    fn degenerate_abscissas_are_flagged() {
        let points: Vec<(f64, ShotEstimate)> = vec![
            (3.0, ShotEstimate::exact(0.1)),
            (3.0, ShotEstimate::exact(0.2)),
            (3.0, ShotEstimate::exact(0.3)),
        ];
        assert!(matches!(
            extrapolate(&points, 1),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn noisy_linear_coverage_hits_the_intercept() {
        // y = −1 + 0.05·x + N(0, 0.01): the fitted intercept should cover
        // the truth within 3 fitted stderr almost always.
        let mut hits = 0;
        for s in 0..100 {
            let mut rng = rng_for(0xC0FFEE, s);
            let points: Vec<(f64, ShotEstimate)> = [1.0, 3.0, 5.0, 7.0]
                .iter()
                .map(|&x| {
                    let g: f64 = rng.sample(StandardNormal);
                    (
                        x,
                        ShotEstimate {
                            value: -1.0 + 0.05 * x + 0.01 * g,
                            stderr: 0.01,
                            shots: ShotCount::Finite(10_000),
                        },
                    )
                })
                .collect();
            let fit = extrapolate(&points, 1).unwrap();
            if (fit.value - (-1.0)).abs() < 3.0 * fit.stderr {
                hits += 1;
            }
        }
        assert!(hits >= 95, "covered only {hits}/100");
    }

    #[test]
    fn depolarizing_error_grows_with_fold_factor() {
        let h = build_triplet_pair();
        let circuit = two_qubit_circuit();
        let noiseless = exact_expectation(
            &run_circuit(&circuit, None).unwrap(),
            &h,
        )
        .unwrap();
        let noise = NoiseModel::depolarizing(0.002, 0.01);
        let cfg = ZneConfig::default();
        let points =
            fold_and_measure(&circuit, &h, Some(&noise), &cfg, ZneEstimator::Bare, 3).unwrap();
        let errors: Vec<f64> = points
            .iter()
            .map(|p| (p.estimate.energy.value - noiseless).abs())
            .collect();
        for w in errors.windows(2) {
            assert!(w[0] < w[1], "errors not increasing: {errors:?}");
        }
    }

    #[test]
    fn krylov_points_sit_below_bare_points() {
        let h = build_triplet_pair();
        let circuit = two_qubit_circuit();
        let noise = NoiseModel::depolarizing(0.002, 0.01);
        let cfg = ZneConfig::default();
        let bare =
            fold_and_measure(&circuit, &h, Some(&noise), &cfg, ZneEstimator::Bare, 3).unwrap();
        let lanczos = fold_and_measure(
            &circuit,
            &h,
            Some(&noise),
            &cfg,
            ZneEstimator::Lanczos { order: 2 },
            3,
        )
        .unwrap();
        for (b, l) in bare.iter().zip(&lanczos) {
            assert_eq!(b.factor, l.factor);
            assert!(l.estimate.energy.value <= b.estimate.energy.value + 1e-12);
        }
    }

    #[test]
    fn extrapolated_krylov_energy_beats_every_folded_point() {
        // Depolarizing noise responds nearly linearly to the fold factor, so
        // the fitted zero-noise value should land closer to the noiseless
        // energy than any measured point, including the unfolded one.
        let h = four_level_operator();
        let circuit = two_qubit_circuit();
        let noiseless_rho = run_circuit(&circuit, None).unwrap();
        let ms = measure_moments(&noiseless_rho, &h, 3, ShotCount::Exact, &[], 0).unwrap();
        let target = lanczos_order2(&ms, &BootstrapCfg::new(0)).unwrap().energy.value;

        let noise = NoiseModel::depolarizing(0.002, 0.01);
        let cfg = ZneConfig::default();
        let points = fold_and_measure(
            &circuit,
            &h,
            Some(&noise),
            &cfg,
            ZneEstimator::Lanczos { order: 2 },
            5,
        )
        .unwrap();
        let fit = extrapolate_points(&points, 1).unwrap();
        let fit_err = (fit.value - target).abs();
        for p in &points {
            let point_err = (p.estimate.energy.value - target).abs();
            assert!(
                fit_err < point_err,
                "fit error {fit_err} not below point error {point_err} at fold {}",
                p.factor
            );
        }
    }

    #[test]
    fn doubling_shots_shrinks_variance_not_bias() {
        let h = build_triplet_pair();
        let circuit = two_qubit_circuit();
        let noise = NoiseModel::depolarizing(0.002, 0.01);
        let base = ZneConfig::default().with_shots(ShotCount::Finite(2048));
        let doubled = ZneConfig::default().with_shots(ShotCount::Finite(4096));
        let n = 100;
        let mut single = Vec::with_capacity(n);
        let mut double = Vec::with_capacity(n);
        for rep in 0..n {
            let s1 = split_seed(21, rep as u64);
            let s2 = split_seed(22, rep as u64);
            let p1 =
                fold_and_measure(&circuit, &h, Some(&noise), &base, ZneEstimator::Bare, s1)
                    .unwrap();
            let p2 = fold_and_measure(
                &circuit,
                &h,
                Some(&noise),
                &doubled,
                ZneEstimator::Bare,
                s2,
            )
            .unwrap();
            single.push(extrapolate_points(&p1, 1).unwrap().value);
            double.push(extrapolate_points(&p2, 1).unwrap().value);
        }
        let (m1, s1) = mean_std(&single);
        let (m2, s2) = mean_std(&double);
        let ratio = (s2 * s2) / (s1 * s1);
        assert!(
            ratio > 0.25 && ratio < 0.9,
            "variance ratio {ratio} not consistent with one half"
        );
        let sep = (m1 - m2).abs() / ((s1 * s1 + s2 * s2) / n as f64).sqrt();
        assert!(sep < 3.0, "means drifted apart: {m1} vs {m2} ({sep}σ)");
    }

    #[test]
    fn budget_comparison_accounts_strings_and_shots() {
        let h = build_triplet_pair();
        let circuit = two_qubit_circuit();
        let cfg = ZneConfig::default().with_shots(ShotCount::Finite(1024));
        let cmp = budget_matched_compare(&circuit, &h, None, &cfg, 5, 11).unwrap();
        // H has 3 strings; H² and H³ keep their non-identity parts.
        assert_eq!(cmp.budget.zne_strings, 4 * 3);
        assert_eq!(cmp.budget.lanczos_strings, moment_string_count(&h, 3).unwrap());
        assert_eq!(cmp.budget.shots_per_string, 1024);
        assert!(cmp.budget.zne_shots_per_string >= 2 * 1024);
        assert!(
            cmp.budget.zne_total() >= cmp.budget.lanczos_total(),
            "extrapolation under-budgeted: {} < {}",
            cmp.budget.zne_total(),
            cmp.budget.lanczos_total()
        );
        assert_eq!(cmp.n_reps, 5);
    }

    #[test]
    fn budget_comparison_agrees_on_an_eigenstate_without_noise() {
        // |00⟩ is a triplet eigenstate of the pair exchange operator (energy
        // −1) and CZ leaves it alone, so the moment pipeline degenerates to
        // the bare mean and extrapolation fits a constant: both sides must
        // report the same energy exactly.
        let h = build_triplet_pair();
        let mut c = Circuit::new(2).unwrap();
        c.cz(0, 1).unwrap();
        let cfg = ZneConfig::default();
        let cmp = budget_matched_compare(&c, &h, None, &cfg, 3, 0).unwrap();
        assert!((cmp.lanczos_mean - cmp.zne_mean).abs() < 1e-10);
        assert!((cmp.lanczos_mean - (-1.0)).abs() < 1e-10);
        // Identical repetitions: any spread is pure rounding.
        assert!(cmp.lanczos_std < 1e-12);
        assert!(cmp.zne_std < 1e-12);
    }
}
