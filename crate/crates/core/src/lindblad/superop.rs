use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::expm::expm;
use super::{Hamiltonian, PhysicalConfig, SinkConvention};
use crate::error::{Error, Result};

/// Generator `G` of the vectorised master equation `ṙ = G r`.
///
/// Vectorisation stacks columns: `r[i + K j] = ρ_ij`. In that convention
/// `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`, so the commutator maps to
/// `I⊗H − Hᵀ⊗I` and `L ρ L†` to `conj(L) ⊗ L`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub matrix: DMatrix<Complex64>,
    /// Hilbert-space dimension K (chain sites, plus one if the sink is present).
    pub dim: usize,
    /// Number of chain sites N.
    pub sites: usize,
    pub sink: bool,
}

impl Liouvillian {
    /// Index of the basis state that counts as the transfer target.
    pub fn target_index(&self) -> usize {
        if self.sink {
            self.sites
        } else {
            self.sites - 1
        }
    }
}

fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// Builds `G = −i(I⊗H − Hᵀ⊗I) + 𝓛_D` with the sink dissipator on the enlarged
/// space when `config.sink_enabled`, otherwise the purely unitary part.
pub fn build_liouvillian(h: &Hamiltonian, config: &PhysicalConfig) -> Result<Liouvillian> {
    let n = h.dim();
    if n == 0 {
        return Err(Error::DegenerateGeometry("empty Hamiltonian".into()));
    }
    let sink = config.sink_enabled;
    let k = if sink { n + 1 } else { n };
    let zero = Complex64::new(0.0, 0.0);
    let mut hk = DMatrix::from_element(k, k, zero);
    hk.view_mut((0, 0), (n, n)).copy_from(&h.matrix);
    let id = DMatrix::<Complex64>::identity(k, k);

    let commutator = kron(&id, &hk) - kron(&hk.transpose(), &id);
    let mut g = commutator * Complex64::new(0.0, -1.0);

    if sink {
        // L = √Γ |S⟩⟨B|, B the right-most chain site.
        let mut l = DMatrix::from_element(k, k, zero);
        l[(n, n - 1)] = Complex64::new(config.gamma_sink.sqrt(), 0.0);
        let ldl = l.adjoint() * &l;
        let f = match config.sink_convention {
            SinkConvention::Standard => 1.0,
            SinkConvention::Doubled => 2.0,
        };
        let jump = kron(&l.map(|z| z.conj()), &l);
        let anti = kron(&id, &ldl) + kron(&ldl.transpose(), &id);
        g += jump * Complex64::new(f, 0.0) - anti * Complex64::new(0.5 * f, 0.0);
    }
    Ok(Liouvillian {
        matrix: g,
        dim: k,
        sites: n,
        sink,
    })
}

/// Vectorised `|A⟩⟨A|`, the excitation localised on the first site.
pub fn initial_state(dim: usize) -> DVector<Complex64> {
    let mut r = DVector::from_element(dim * dim, Complex64::new(0.0, 0.0));
    r[0] = Complex64::new(1.0, 0.0);
    r
}

/// Population `ρ_ii` of a vectorised density matrix.
pub fn population(r: &DVector<Complex64>, dim: usize, i: usize) -> f64 {
    r[i + dim * i].re
}

/// `exp(t G) r0`.
pub fn propagate(g: &Liouvillian, r0: &DVector<Complex64>, t: f64) -> Result<DVector<Complex64>> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "propagation time must be finite and >= 0, got {t}"
        )));
    }
    if r0.len() != g.matrix.nrows() {
        return Err(Error::InvalidConfig(format!(
            "state has length {}, generator acts on {}",
            r0.len(),
            g.matrix.nrows()
        )));
    }
    if t == 0.0 {
        return Ok(r0.clone());
    }
    let step = expm(&(&g.matrix * Complex64::new(t, 0.0)))?;
    Ok(step * r0)
}
