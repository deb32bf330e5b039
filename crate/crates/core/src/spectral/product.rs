use crate::error::Result;
use crate::scalar::{Cplx, Real};
use crate::spectral::field::{check_same, PhysicalField, ScalarField, SpectralField};
use crate::spectral::lattice::Band;
use crate::spectral::ops::mul_i;
use crate::spectral::transform::{forward_real, from_physical, inverse_real, to_physical_many};

/// Bilinear pointwise products supported by [`pointwise_product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProductKind {
    /// `a × b`
    Cross,
    /// `div(a ⊗ b)`, component `i` equal to `Σ_j ∂_j (a_i b_j)`
    TensorDivergence,
    /// `a · b`
    Dot,
}

/// Result of a product: vector-valued for cross and tensor-divergence,
/// scalar for dot.
#[derive(Debug, Clone)]
pub enum ProductOutput<T: Real> {
    Vector(SpectralField<T>),
    Scalar(ScalarField<T>),
}

impl<T: Real> ProductOutput<T> {
    pub fn into_vector(self) -> Option<SpectralField<T>> {
        match self {
            ProductOutput::Vector(v) => Some(v),
            ProductOutput::Scalar(_) => None,
        }
    }

    pub fn into_scalar(self) -> Option<ScalarField<T>> {
        match self {
            ProductOutput::Scalar(s) => Some(s),
            ProductOutput::Vector(_) => None,
        }
    }

    pub fn norm_l2(&self) -> T {
        match self {
            ProductOutput::Vector(v) => v.norm_l2(),
            ProductOutput::Scalar(s) => s.norm_l2(),
        }
    }
}

/// Pointwise cross product of sampled fields.
pub fn phys_cross<T: Real>(a: &PhysicalField<T>, b: &PhysicalField<T>) -> PhysicalField<T> {
    let mut out = PhysicalField::zeros(a.lattice());
    let (ac, bc) = (a.comps(), b.comps());
    let oc = out.comps_mut();
    for idx in 0..ac[0].len() {
        let (a0, a1, a2) = (ac[0][idx], ac[1][idx], ac[2][idx]);
        let (b0, b1, b2) = (bc[0][idx], bc[1][idx], bc[2][idx]);
        oc[0][idx] = a1 * b2 - a2 * b1;
        oc[1][idx] = a2 * b0 - a0 * b2;
        oc[2][idx] = a0 * b1 - a1 * b0;
    }
    out
}

/// Pointwise dot product of sampled fields.
pub fn phys_dot<T: Real>(a: &PhysicalField<T>, b: &PhysicalField<T>) -> Vec<T> {
    let (ac, bc) = (a.comps(), b.comps());
    (0..ac[0].len())
        .map(|idx| ac[0][idx] * bc[0][idx] + ac[1][idx] * bc[1][idx] + ac[2][idx] * bc[2][idx])
        .collect()
}

/// Coefficients of a sampled field truncated to `band`, zero mode dropped.
pub fn analyze<T: Real>(p: &PhysicalField<T>, band: Band) -> SpectralField<T> {
    let mut s = from_physical(p);
    s.truncate(band);
    s.clear_zero_mode();
    s
}

/// `div(a ⊗ b)` from sampled factors, truncated to `band`, zero mode dropped.
pub fn tensor_divergence_phys<T: Real>(
    a: &PhysicalField<T>,
    b: &PhysicalField<T>,
    band: Band,
) -> SpectralField<T> {
    let lat = a.lattice().clone();
    let (ac, bc) = (a.comps(), b.comps());
    let mut prods: Vec<Vec<T>> = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            prods.push(ac[i].iter().zip(&bc[j]).map(|(x, y)| *x * *y).collect());
        }
    }
    let refs: Vec<&[T]> = prods.iter().map(|v| v.as_slice()).collect();
    let spec = forward_real(&lat, &refs);
    let mut out = SpectralField::zeros(&lat);
    for idx in 1..lat.len() {
        if !lat.in_band(idx, band) {
            continue;
        }
        let xi = lat.wavevector(idx);
        let mut v = [Cplx::default(); 3];
        for (i, vi) in v.iter_mut().enumerate() {
            let s = spec[3 * i][idx] * xi[0] + spec[3 * i + 1][idx] * xi[1] + spec[3 * i + 2][idx] * xi[2];
            *vi = mul_i(s);
        }
        out.set(idx, v);
    }
    out
}

/// Product of two fields with inputs and output truncated to `band`.
pub fn product_on_band<T: Real>(
    a: &SpectralField<T>,
    b: &SpectralField<T>,
    kind: ProductKind,
    band: Band,
) -> Result<ProductOutput<T>> {
    check_same(a.lattice(), b.lattice())?;
    let at = a.truncated(band);
    let bt = b.truncated(band);
    let p = to_physical_many(&[&at, &bt]);
    Ok(match kind {
        ProductKind::Cross => ProductOutput::Vector(analyze(&phys_cross(&p[0], &p[1]), band)),
        ProductKind::TensorDivergence => {
            ProductOutput::Vector(tensor_divergence_phys(&p[0], &p[1], band))
        }
        ProductKind::Dot => {
            let lat = a.lattice();
            let d = phys_dot(&p[0], &p[1]);
            let mut c = forward_real(lat, &[&d]).pop().unwrap_or_default();
            for (idx, z) in c.iter_mut().enumerate() {
                if idx == 0 || !lat.in_band(idx, band) {
                    *z = Cplx::default();
                }
            }
            ProductOutput::Scalar(ScalarField::from_coeffs(lat, c)?)
        }
    })
}

/// Dealiased product: inputs and output restricted to the 2/3 band, zero
/// mode discarded.
pub fn pointwise_product<T: Real>(
    a: &SpectralField<T>,
    b: &SpectralField<T>,
    kind: ProductKind,
) -> Result<ProductOutput<T>> {
    product_on_band(a, b, kind, Band::TwoThirds)
}

/// Samples a scalar field on the grid.
pub fn scalar_samples<T: Real>(s: &ScalarField<T>) -> Vec<T> {
    inverse_real(s.lattice(), &[s.coeffs()]).pop().unwrap_or_default()
}
