//! Dynamic graph wavelet frames.
//!
//! An atom `W_{m,tau,s}` is the causal damped-wave kernel at scale `s`,
//! localized at source vertex `m` and onset time `tau` through the graph
//! spectral localization operator:
//!
//! `W_{m,tau,s}(n,t) = sum_l K(s lambda_l, t - tau) u_l(m) u_l(n)`.
//!
//! The frame never materializes atoms for analysis. Each scale is cached as a
//! joint-spectral multiplier `W_hat_s(lambda_l, omega_k)` — the DFT of the
//! kernel time profile per eigenvalue — and analysis/synthesis are Hadamard
//! products in the joint spectral domain:
//!
//! * analysis:  `C_s = IJFT(conj(W_hat_s) .* JFT(X))`
//! * synthesis: `X'  = sum_s IJFT(W_hat_s .* JFT(C_s))` (the adjoint)
//!
//! Frame bounds are `A = min_{l,k} sum_s |W_hat_s|^2` and
//! `B = max_{l,k} sum_s |W_hat_s|^2`, which equal the extreme squared
//! singular values of the stacked atom matrix. Multipliers carry the plain
//! (unnormalized) DFT of the profile so that these bounds line up with both
//! the atom inner products and the closed-form lower bound
//! `|(1 - exp(-beta))/4|^2` per scale.
//!
//! Time convolution is circular, consistent with the ring-time formalism; the
//! damping makes wrap-around negligible once `exp(-beta T)` is small, and
//! [`DgwFrame::wrap_residual`] exposes that factor as a diagnostic.

use ndarray::{Array2, Array3, Axis};
use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{DgwError, Result};
use crate::graph::SpectralBasis;
use crate::kernels;
use crate::time_vertex::{dft_rows_unitary_seq, jft, TimeVertexSignal};

/// Relative tolerance on the imaginary residue of analysis/synthesis outputs;
/// real kernels on real signals must produce real results up to roundoff.
const IMAG_RESIDUE_TOL: f64 = 1e-8;

/// Frame bounds `A <= B` of the analysis operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    /// Lower bound A: the minimum of `sum_s |W_hat_s|^2` over the joint grid.
    pub lower: f64,
    /// Upper bound B: the maximum of the same map.
    pub upper: f64,
}

/// Closed-form lower bound on `|W_hat(lambda, omega)|^2` per scale from the
/// infinite-horizon spectrum: `((1 - exp(-beta)) / 4)^2`.
pub fn corollary_lower_bound(beta: f64) -> f64 {
    ((1.0 - (-beta).exp()) / 4.0).powi(2)
}

/// Analysis coefficients indexed by (scale, source vertex, onset time),
/// carrying the scale values of the frame that produced them.
#[derive(Debug, Clone)]
pub struct CoefficientTensor {
    values: Array3<f64>,
    scales: Vec<f64>,
}

impl CoefficientTensor {
    pub fn new(values: Array3<f64>, scales: Vec<f64>) -> Result<Self> {
        if values.dim().0 != scales.len() {
            return Err(DgwError::DimensionMismatch(format!(
                "tensor has {} scale slabs but {} scale values",
                values.dim().0,
                scales.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DgwError::Numeric(
                "coefficient tensor contains non-finite entries".into(),
            ));
        }
        Ok(Self { values, scales })
    }

    pub fn zeros(n_scales: usize, n_vertices: usize, n_steps: usize, scales: Vec<f64>) -> Self {
        Self {
            values: Array3::zeros((n_scales, n_vertices, n_steps)),
            scales,
        }
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array3<f64> {
        self.values
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Index of the largest-energy coefficient, ties broken by lowest vertex,
    /// then lowest onset time, then lowest scale index. Returns
    /// `(scale_index, vertex, tau)`; `None` when all entries are zero.
    pub fn argmax_by_energy(&self) -> Option<(usize, usize, usize)> {
        let (n_scales, n_vertices, n_steps) = self.values.dim();
        let mut best: Option<((usize, usize, usize), f64)> = None;
        for m in 0..n_vertices {
            for tau in 0..n_steps {
                for s in 0..n_scales {
                    let e = self.values[[s, m, tau]].powi(2);
                    if e > 0.0 && best.is_none_or(|(_, be)| e > be) {
                        best = Some(((s, m, tau), e));
                    }
                }
            }
        }
        best.map(|(idx, _)| idx)
    }
}

/// A built frame: spectral basis, time horizon, scale list, damping, and the
/// cached joint-spectral multipliers (S x N x T).
#[derive(Debug, Clone)]
pub struct DgwFrame {
    basis: SpectralBasis,
    n_steps: usize,
    scales: Vec<f64>,
    beta: f64,
    multipliers: Array3<Complex64>,
    bounds: FrameBounds,
}

impl DgwFrame {
    /// Build a frame over `basis` with `n_steps` time samples, one atom family
    /// per scale, damping `beta`.
    ///
    /// Errors if the scale list is empty or any scale violates the stability
    /// bound `s * lambda_max < 4`. `beta <= 0` is permitted but the frame
    /// property is then not guaranteed; callers can check [`Self::beta`].
    pub fn build(
        basis: SpectralBasis,
        n_steps: usize,
        scales: &[f64],
        beta: f64,
    ) -> Result<Self> {
        if scales.is_empty() {
            return Err(DgwError::InvalidParameter("empty scale list".into()));
        }
        if n_steps < 2 {
            return Err(DgwError::InvalidParameter(format!(
                "frame needs T >= 2, got {n_steps}"
            )));
        }
        if !beta.is_finite() {
            return Err(DgwError::InvalidParameter(format!(
                "beta = {beta} must be finite"
            )));
        }
        let lambda_max = basis.lambda_max();
        for &s in scales {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(DgwError::InvalidParameter(format!(
                    "scale {s} must be a finite nonnegative number"
                )));
            }
            if s * lambda_max > 4.0 + 1e-9 {
                return Err(DgwError::Stability {
                    scale: s,
                    s_lambda: s * lambda_max,
                    bound: 4.0 / lambda_max,
                });
            }
        }

        let n = basis.n_vertices();
        let eigenvalues: Vec<f64> = basis.eigenvalues().iter().copied().collect();

        let compute_slab = |&s: &f64| -> Result<Array2<Complex64>> {
            let mut slab = Array2::<Complex64>::zeros((n, n_steps));
            for (l, &lambda) in eigenvalues.iter().enumerate() {
                let row = kernels::damped_profile_dft(s, beta, lambda, n_steps)?;
                for (k, v) in row.into_iter().enumerate() {
                    slab[[l, k]] = v;
                }
            }
            Ok(slab)
        };

        #[cfg(feature = "parallel")]
        let slabs: Result<Vec<Array2<Complex64>>> = scales.par_iter().map(compute_slab).collect();
        #[cfg(not(feature = "parallel"))]
        let slabs: Result<Vec<Array2<Complex64>>> = scales.iter().map(compute_slab).collect();

        let slabs = slabs?;
        let mut multipliers = Array3::<Complex64>::zeros((scales.len(), n, n_steps));
        for (s_idx, slab) in slabs.into_iter().enumerate() {
            multipliers.index_axis_mut(Axis(0), s_idx).assign(&slab);
        }

        let bounds = bounds_from_multipliers(&multipliers);
        Ok(Self {
            basis,
            n_steps,
            scales: scales.to_vec(),
            beta,
            multipliers,
            bounds,
        })
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    pub fn n_vertices(&self) -> usize {
        self.basis.n_vertices()
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_scales(&self) -> usize {
        self.scales.len()
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Joint-spectral multipliers, S x N x T.
    pub fn multipliers(&self) -> &Array3<Complex64> {
        &self.multipliers
    }

    /// Frame bounds computed from the cached multipliers.
    pub fn frame_bounds(&self) -> FrameBounds {
        self.bounds
    }

    /// Circular wrap-around factor `exp(-beta T)`. Values above ~1e-3 mean the
    /// periodic time boundary is no longer negligible for these atoms.
    pub fn wrap_residual(&self) -> f64 {
        (-self.beta * self.n_steps as f64).exp()
    }

    /// Materialize one atom: causal (zero before `tau`), not wrapped.
    pub fn atom(&self, m: usize, tau: usize, s_index: usize) -> Result<TimeVertexSignal> {
        let s = *self.scales.get(s_index).ok_or_else(|| {
            DgwError::InvalidParameter(format!(
                "scale index {s_index} out of range (S = {})",
                self.scales.len()
            ))
        })?;
        materialize_atom(&self.basis, self.n_steps, s, self.beta, m, tau)
    }

    /// Frame analysis: correlate the signal with every atom, computed in the
    /// joint spectral domain, one Hadamard product per scale.
    pub fn analyze(&self, x: &TimeVertexSignal) -> Result<CoefficientTensor> {
        self.check_signal_dims(x)?;
        let spectrum = jft(x, &self.basis)?;
        let spec = spectrum.values();

        let scale_pass = |s_idx: usize| -> Result<Array2<f64>> {
            let mult = self.multipliers.index_axis(Axis(0), s_idx);
            let mut z = Array2::<Complex64>::zeros(spec.raw_dim());
            ndarray::Zip::from(&mut z)
                .and(spec)
                .and(&mult)
                .for_each(|o, &x, &w| *o = w.conj() * x);
            dft_rows_unitary_seq(&mut z, true);
            check_imag_residue(&z, "analysis")?;
            let re = z.mapv(|v| v.re);
            Ok(self.basis.eigenvectors().dot(&re))
        };

        #[cfg(feature = "parallel")]
        let per_scale: Result<Vec<Array2<f64>>> =
            (0..self.n_scales()).into_par_iter().map(scale_pass).collect();
        #[cfg(not(feature = "parallel"))]
        let per_scale: Result<Vec<Array2<f64>>> = (0..self.n_scales()).map(scale_pass).collect();

        let per_scale = per_scale?;
        let mut values = Array3::<f64>::zeros((self.n_scales(), self.n_vertices(), self.n_steps));
        for (s_idx, slab) in per_scale.into_iter().enumerate() {
            values.index_axis_mut(Axis(0), s_idx).assign(&slab);
        }
        CoefficientTensor::new(values, self.scales.clone())
    }

    /// Frame synthesis, the adjoint of [`Self::analyze`].
    pub fn synthesize(&self, c: &CoefficientTensor) -> Result<TimeVertexSignal> {
        self.check_coeff_dims(c)?;

        let scale_pass = |s_idx: usize| -> Array2<Complex64> {
            let slab = c.values().index_axis(Axis(0), s_idx);
            let gft = self.basis.eigenvectors().t().dot(&slab);
            let mut spec = gft.mapv(|v| Complex64::new(v, 0.0));
            dft_rows_unitary_seq(&mut spec, false);
            let mult = self.multipliers.index_axis(Axis(0), s_idx);
            ndarray::Zip::from(&mut spec).and(&mult).for_each(|o, &w| *o *= w);
            spec
        };

        let zero = || Array2::<Complex64>::zeros((self.n_vertices(), self.n_steps));
        #[cfg(feature = "parallel")]
        let acc = (0..self.n_scales())
            .into_par_iter()
            .map(scale_pass)
            .reduce(zero, |a, b| a + b);
        #[cfg(not(feature = "parallel"))]
        let acc = (0..self.n_scales()).map(scale_pass).fold(zero(), |a, b| a + b);

        let mut time_domain = acc;
        dft_rows_unitary_seq(&mut time_domain, true);
        check_imag_residue(&time_domain, "synthesis")?;
        let re = time_domain.mapv(|v| v.re);
        TimeVertexSignal::new(self.basis.eigenvectors().dot(&re))
    }

    /// `|W_hat_s|^2` summed over scales on the (l, k) grid.
    pub fn multiplier_energy(&self) -> Array2<f64> {
        energy_map(&self.multipliers)
    }

    fn check_signal_dims(&self, x: &TimeVertexSignal) -> Result<()> {
        if x.n_vertices() != self.n_vertices() || x.n_steps() != self.n_steps {
            return Err(DgwError::DimensionMismatch(format!(
                "signal is {}x{}, frame expects {}x{}",
                x.n_vertices(),
                x.n_steps(),
                self.n_vertices(),
                self.n_steps
            )));
        }
        Ok(())
    }

    fn check_coeff_dims(&self, c: &CoefficientTensor) -> Result<()> {
        let want = (self.n_scales(), self.n_vertices(), self.n_steps);
        if c.values().dim() != want {
            return Err(DgwError::DimensionMismatch(format!(
                "coefficient tensor is {:?}, frame expects {:?}",
                c.values().dim(),
                want
            )));
        }
        Ok(())
    }
}

fn energy_map(multipliers: &Array3<Complex64>) -> Array2<f64> {
    let (_, n, t) = multipliers.dim();
    let mut map = Array2::<f64>::zeros((n, t));
    for slab in multipliers.axis_iter(Axis(0)) {
        ndarray::Zip::from(&mut map).and(&slab).for_each(|e, &w| *e += w.norm_sqr());
    }
    map
}

fn bounds_from_multipliers(multipliers: &Array3<Complex64>) -> FrameBounds {
    let map = energy_map(multipliers);
    let mut lower = f64::INFINITY;
    let mut upper = 0.0_f64;
    for &e in &map {
        lower = lower.min(e);
        upper = upper.max(e);
    }
    FrameBounds { lower, upper }
}

fn check_imag_residue(z: &Array2<Complex64>, what: &str) -> Result<()> {
    let mut max_im = 0.0_f64;
    let mut max_re = 0.0_f64;
    for v in z {
        max_im = max_im.max(v.im.abs());
        max_re = max_re.max(v.re.abs());
    }
    if max_im > IMAG_RESIDUE_TOL * (1.0 + max_re) {
        return Err(DgwError::Numeric(format!(
            "{what} output has imaginary residue {max_im:.3e} (max real {max_re:.3e}); \
             inputs are not consistently real"
        )));
    }
    Ok(())
}

/// Materialize the causal damped-wave atom at (`m`, `tau`) for one scale,
/// directly from the eigenbasis. Zero before the onset; no periodic wrap.
pub fn materialize_atom(
    basis: &SpectralBasis,
    n_steps: usize,
    scale: f64,
    beta: f64,
    m: usize,
    tau: usize,
) -> Result<TimeVertexSignal> {
    let n = basis.n_vertices();
    if m >= n {
        return Err(DgwError::InvalidParameter(format!(
            "vertex {m} out of range (N = {n})"
        )));
    }
    if tau >= n_steps {
        return Err(DgwError::InvalidParameter(format!(
            "onset {tau} out of range (T = {n_steps})"
        )));
    }
    let lambda_max = basis.lambda_max();
    if scale * lambda_max > 4.0 + 1e-9 {
        return Err(DgwError::Stability {
            scale,
            s_lambda: scale * lambda_max,
            bound: 4.0 / lambda_max,
        });
    }

    let u = basis.eigenvectors();
    let thetas: Vec<f64> = basis
        .eigenvalues()
        .iter()
        .map(|&l| (1.0 - (scale * l).clamp(0.0, 4.0) / 2.0).acos())
        .collect();
    let source_row: Vec<f64> = (0..n).map(|l| u[[m, l]]).collect();

    let mut values = Array2::<f64>::zeros((n, n_steps));
    let mut weighted = ndarray::Array1::<f64>::zeros(n);
    for t in tau..n_steps {
        let dt = (t - tau) as f64;
        let envelope = (-beta * dt).exp();
        for l in 0..n {
            weighted[l] = envelope * (dt * thetas[l]).cos() * source_row[l];
        }
        values.column_mut(t).assign(&u.dot(&weighted));
    }
    TimeVertexSignal::new(values)
}

/// Default scale grid: `num_scales` points linearly spaced on `(0, s_max]`
/// with `s_max = min(2, 3.99 / lambda_max)`. Zero is excluded (a scale of
/// zero produces a non-propagating, time-only atom).
pub fn default_scale_grid(num_scales: usize, lambda_max: f64) -> Vec<f64> {
    let s_max = if lambda_max > 0.0 {
        (3.99 / lambda_max).min(2.0)
    } else {
        2.0
    };
    (1..=num_scales)
        .map(|i| s_max * i as f64 / num_scales as f64)
        .collect()
}

/// Evenly spaced scale grid on `[s_min, s_max]`, endpoints included.
pub fn scale_grid(num_scales: usize, s_min: f64, s_max: f64) -> Result<Vec<f64>> {
    if num_scales == 0 {
        return Err(DgwError::InvalidParameter("num_scales must be >= 1".into()));
    }
    if !(s_min > 0.0) || s_max < s_min {
        return Err(DgwError::InvalidParameter(format!(
            "scale range [{s_min}, {s_max}] must satisfy 0 < s_min <= s_max"
        )));
    }
    if num_scales == 1 {
        return Ok(vec![s_max]);
    }
    let step = (s_max - s_min) / (num_scales - 1) as f64;
    Ok((0..num_scales).map(|i| s_min + step * i as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{eigendecompose, Graph};
    use crate::time_vertex::{ijft, JointSpectrum};
    use ndarray::array;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn k2_basis() -> SpectralBasis {
        let g = Graph::from_weights(array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        eigendecompose(&g).unwrap()
    }

    fn small_basis(n: usize, seed: u64) -> SpectralBasis {
        // random connected weighted graph
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                let v: f64 = rng.random();
                let keep = v > 0.4 || j == i + 1;
                if keep {
                    let weight = 0.2 + rng.random::<f64>();
                    w[[i, j]] = weight;
                    w[[j, i]] = weight;
                }
            }
        }
        let g = Graph::from_weights(w).unwrap();
        eigendecompose(&g).unwrap()
    }

    fn random_signal(n: usize, t: usize, seed: u64) -> TimeVertexSignal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        TimeVertexSignal::new(Array2::from_shape_fn((n, t), |_| {
            rng.random::<f64>() * 2.0 - 1.0
        }))
        .unwrap()
    }

    fn test_frame(n: usize, t: usize, n_scales: usize, beta: f64, seed: u64) -> DgwFrame {
        let basis = small_basis(n, seed);
        let scales = default_scale_grid(n_scales, basis.lambda_max());
        DgwFrame::build(basis, t, &scales, beta).unwrap()
    }

    #[test]
    fn build_rejects_empty_scales_and_instability() {
        let basis = k2_basis();
        assert!(matches!(
            DgwFrame::build(basis.clone(), 8, &[], 1.0),
            Err(DgwError::InvalidParameter(_))
        ));
        // lambda_max = 2, so s = 2.5 gives s*lambda = 5 > 4
        match DgwFrame::build(basis, 8, &[0.5, 2.5], 1.0) {
            Err(DgwError::Stability { scale, .. }) => assert_eq!(scale, 2.5),
            other => panic!("expected stability error, got {other:?}"),
        }
    }

    #[test]
    fn atom_at_onset_is_vertex_delta() {
        let frame = test_frame(5, 12, 3, 0.8, 42);
        let atom = frame.atom(2, 4, 1).unwrap();
        for n in 0..5 {
            let expect = if n == 2 { 1.0 } else { 0.0 };
            assert!((atom.values()[[n, 4]] - expect).abs() < 1e-10);
        }
        // causal: zero before onset
        for n in 0..5 {
            for t in 0..4 {
                assert_eq!(atom.values()[[n, t]], 0.0);
            }
        }
    }

    #[test]
    fn atom_on_k2_hand_value() {
        // lambda = {0, 2}, s = 1, beta = 0, one step after onset:
        // value at source = (cos(0) + cos(arccos(0)))/2 = 1/2
        let basis = k2_basis();
        let atom = materialize_atom(&basis, 4, 1.0, 0.0, 0, 0).unwrap();
        assert!((atom.values()[[0, 1]] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn atom_energy_decays_with_damping() {
        let beta = 0.6;
        let frame = test_frame(6, 16, 2, beta, 7);
        let atom = frame.atom(3, 2, 0).unwrap();
        let n = frame.n_vertices() as f64;
        for t in 2..16 {
            let col_norm: f64 = (0..6).map(|v| atom.values()[[v, t]].powi(2)).sum::<f64>().sqrt();
            let bound = (-beta * (t - 2) as f64).exp() * n.sqrt();
            assert!(col_norm <= bound + 1e-12);
        }
    }

    #[test]
    fn near_delta_frame_atom_concentrates() {
        // S=1, huge beta, tiny s: atom is approximately a delta at the onset,
        // localized at the source vertex.
        let basis = small_basis(6, 3);
        let frame = DgwFrame::build(basis, 16, &[1e-6], 20.0).unwrap();
        let atom = frame.atom(4, 5, 0).unwrap();
        for n in 0..6 {
            for t in 0..16 {
                let expect = if n == 4 && t == 5 { 1.0 } else { 0.0 };
                assert!(
                    (atom.values()[[n, t]] - expect).abs() < 1e-4,
                    "atom not delta-like at ({n},{t})"
                );
            }
        }
        // near-delta atoms make a near-tight frame
        let bounds = frame.frame_bounds();
        assert!(bounds.upper / bounds.lower < 1.001);
    }

    #[test]
    fn analyze_zero_is_zero() {
        let frame = test_frame(4, 8, 2, 1.0, 1);
        let c = frame.analyze(&TimeVertexSignal::zeros(4, 8)).unwrap();
        assert_eq!(c.max_abs(), 0.0);
    }

    #[test]
    fn analyze_matches_brute_force_inner_products() {
        // Dense oracle: C(m,tau,s) = sum_{n,t} W_circ(n,t) X(n,t) with the
        // circularly wrapped atom materialized by direct summation.
        let n = 6;
        let t_len = 8;
        let basis = small_basis(n, 9);
        let scales = default_scale_grid(2, basis.lambda_max());
        let beta = 1.1;
        let frame = DgwFrame::build(basis.clone(), t_len, &scales, beta).unwrap();
        let x = random_signal(n, t_len, 33);
        let c = frame.analyze(&x).unwrap();

        let u = basis.eigenvectors();
        for (s_idx, &s) in scales.iter().enumerate() {
            let thetas: Vec<f64> = basis
                .eigenvalues()
                .iter()
                .map(|&l| (1.0 - (s * l).clamp(0.0, 4.0) / 2.0).acos())
                .collect();
            for m in 0..n {
                for tau in 0..t_len {
                    let mut inner = 0.0;
                    for v in 0..n {
                        for t in 0..t_len {
                            let dt = (t + t_len - tau) % t_len;
                            let mut w = 0.0;
                            for l in 0..n {
                                w += (-beta * dt as f64).exp()
                                    * (dt as f64 * thetas[l]).cos()
                                    * u[[m, l]]
                                    * u[[v, l]];
                            }
                            inner += w * x.values()[[v, t]];
                        }
                    }
                    let got = c.values()[[s_idx, m, tau]];
                    assert!(
                        (got - inner).abs() < 1e-8,
                        "mismatch at (s={s_idx}, m={m}, tau={tau}): {got} vs {inner}"
                    );
                }
            }
        }
    }

    #[test]
    fn analyze_of_atom_peaks_at_its_index() {
        let frame = test_frame(8, 16, 3, 1.0, 21);
        let (m0, tau0, s0) = (5, 3, 1);
        let x = frame.atom(m0, tau0, s0).unwrap();
        let c = frame.analyze(&x).unwrap();
        let (s, m, tau) = c.argmax_by_energy().unwrap();
        // matched filter: maximum at or adjacent to the planted index
        assert_eq!(m, m0);
        assert!((tau as i64 - tau0 as i64).abs() <= 1, "tau = {tau}");
        assert!((s as i64 - s0 as i64).abs() <= 1, "s = {s}");
    }

    #[test]
    fn synthesize_delta_reproduces_atom() {
        // beta*T large enough that circular wrap is below 1e-10
        let n = 5;
        let t_len = 16;
        let basis = small_basis(n, 13);
        let scales = default_scale_grid(2, basis.lambda_max());
        let frame = DgwFrame::build(basis, t_len, &scales, 2.0).unwrap();
        let (m, tau, s_idx) = (2, 3, 1);
        let mut c = CoefficientTensor::zeros(2, n, t_len, scales.clone());
        c.values[[s_idx, m, tau]] = 1.0;
        let x = frame.synthesize(&c).unwrap();
        let atom = frame.atom(m, tau, s_idx).unwrap();
        let max_err = (x.values() - atom.values())
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-10, "max_err = {max_err}");
    }

    #[test]
    fn analyze_synthesize_adjoint_pair() {
        let frame = test_frame(6, 10, 3, 0.9, 17);
        let x = random_signal(6, 10, 2);
        let c_probe = CoefficientTensor::new(
            {
                let mut rng = ChaCha8Rng::seed_from_u64(3);
                Array3::from_shape_fn((3, 6, 10), |_| rng.random::<f64>() - 0.5)
            },
            frame.scales().to_vec(),
        )
        .unwrap();

        let ax = frame.analyze(&x).unwrap();
        let sc = frame.synthesize(&c_probe).unwrap();

        let lhs: f64 = ax
            .values()
            .iter()
            .zip(c_probe.values().iter())
            .map(|(a, b)| a * b)
            .sum();
        let rhs: f64 = x
            .values()
            .iter()
            .zip(sc.values().iter())
            .map(|(a, b)| a * b)
            .sum();
        assert!(
            (lhs - rhs).abs() <= 1e-8 * lhs.abs().max(rhs.abs()).max(1.0),
            "adjoint mismatch: {lhs} vs {rhs}"
        );
    }

    #[test]
    fn parseval_identity_for_analysis_energy() {
        // ||analyze(X)||^2 = sum_s ||W_hat_s .* X_hat||^2
        let frame = test_frame(5, 8, 3, 1.2, 5);
        let x = random_signal(5, 8, 8);
        let c = frame.analyze(&x).unwrap();
        let spec = jft(&x, frame.basis()).unwrap();
        let mut expect = 0.0;
        for s_idx in 0..frame.n_scales() {
            let mult = frame.multipliers().index_axis(Axis(0), s_idx);
            for (w, xs) in mult.iter().zip(spec.values().iter()) {
                expect += (w * xs).norm_sqr();
            }
        }
        let got = c.frobenius_norm().powi(2);
        assert!((got - expect).abs() < 1e-8 * expect.max(1.0));
    }

    #[test]
    fn frame_inequality_on_random_signals() {
        let frame = test_frame(6, 8, 3, 1.0, 31);
        let b = frame.frame_bounds();
        assert!(b.lower > 0.0 && b.lower <= b.upper);
        for seed in 0..20 {
            let x = random_signal(6, 8, 100 + seed);
            let energy = x.frobenius_norm().powi(2);
            let c_energy = frame.analyze(&x).unwrap().frobenius_norm().powi(2);
            let slack = 1e-9 * b.upper * energy;
            assert!(b.lower * energy - slack <= c_energy);
            assert!(c_energy <= b.upper * energy + slack);
        }
    }

    #[test]
    fn lower_bound_beats_corollary() {
        for beta in [0.3, 1.0] {
            let frame = test_frame(5, 64, 3, beta, 77);
            let bound = corollary_lower_bound(beta);
            assert!(
                frame.frame_bounds().lower >= bound - 1e-9,
                "A = {} < corollary bound {bound}",
                frame.frame_bounds().lower
            );
        }
    }

    #[test]
    fn synthesize_analyze_composition_is_spectral_energy_filter() {
        // synthesize(analyze(X)) = IJFT(sum_s |W_hat_s|^2 .* JFT(X))
        let frame = test_frame(5, 8, 2, 1.0, 19);
        let x = random_signal(5, 8, 4);
        let round = frame.synthesize(&frame.analyze(&x).unwrap()).unwrap();

        let spec = jft(&x, frame.basis()).unwrap();
        let energy = frame.multiplier_energy();
        let filtered = spec.values() * &energy.mapv(|e| Complex64::new(e, 0.0));
        let oracle = ijft(&JointSpectrum::new(filtered), frame.basis()).unwrap();

        let max_err = (round.values() - oracle.values())
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-8);
    }

    #[test]
    fn multipliers_match_kernel_time_spectrum() {
        // cached multipliers are sqrt(T) times the unitary spectra
        let frame = test_frame(4, 8, 2, 0.7, 23);
        let scale_factor = (frame.n_steps() as f64).sqrt();
        for (s_idx, &s) in frame.scales().iter().enumerate() {
            let spec = kernels::KernelSpec::damped_wave(s, frame.beta()).unwrap();
            for (l, &lambda) in frame.basis().eigenvalues().iter().enumerate() {
                let unitary = kernels::kernel_time_spectrum(&spec, lambda, 8).unwrap();
                for (k, v) in unitary.iter().enumerate() {
                    let cached = frame.multipliers()[[s_idx, l, k]];
                    assert!((cached - v * scale_factor).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn scale_grids() {
        let grid = default_scale_grid(10, 1.0);
        assert_eq!(grid.len(), 10);
        assert!(grid[0] > 0.0);
        assert!((grid[9] - 2.0).abs() < 1e-12);
        // clamped by stability when lambda_max is large
        let clamped = default_scale_grid(4, 10.0);
        assert!((clamped[3] - 0.399).abs() < 1e-12);

        let explicit = scale_grid(3, 0.5, 1.5).unwrap();
        assert_eq!(explicit, vec![0.5, 1.0, 1.5]);
        assert!(scale_grid(2, 0.0, 1.0).is_err());
    }

    #[test]
    fn coefficient_argmax_tie_breaking() {
        let mut values = Array3::<f64>::zeros((2, 3, 4));
        values[[1, 2, 3]] = 2.0;
        values[[0, 1, 1]] = -2.0; // same energy, lower vertex wins
        let c = CoefficientTensor::new(values, vec![0.5, 1.0]).unwrap();
        assert_eq!(c.argmax_by_energy(), Some((0, 1, 1)));
    }
}
