use crate::dyadic::blocks::block_of;
use crate::dyadic::partition::DyadicPartition;
use crate::error::Result;
use crate::scalar::Real;
use crate::spectral::field::check_same;
use crate::spectral::product::{analyze, phys_cross, phys_dot, tensor_divergence_phys};
use crate::spectral::transform::{forward_real, to_physical_many};
use crate::spectral::{Band, PhysicalField, ProductKind, ProductOutput, ScalarField, SpectralField};

/// The three Bony pieces of a dealiased product `u ∘ v`.
#[derive(Debug, Clone)]
pub struct BonySplit<T: Real> {
    /// `Σ_q S_{q-1}u ∘ Δ_q v`
    pub t_u_v: ProductOutput<T>,
    /// `Σ_q Δ_q u ∘ S_{q-1}v`
    pub t_v_u: ProductOutput<T>,
    /// `Σ_q Δ_q u ∘ (Δ_{q-1} + Δ_q + Δ_{q+1}) v`
    pub remainder: ProductOutput<T>,
    /// Dealiased product `u ∘ v` computed directly.
    pub product: ProductOutput<T>,
}

impl<T: Real> BonySplit<T> {
    /// Relative residual `‖T_u v + T_v u + R - uv‖ / ‖uv‖` (absolute when the
    /// product vanishes).
    pub fn residual(&self) -> f64 {
        let sum_minus = |a: &ProductOutput<T>, b: &ProductOutput<T>, c: &ProductOutput<T>, p: &ProductOutput<T>| {
            match (a, b, c, p) {
                (ProductOutput::Vector(a), ProductOutput::Vector(b), ProductOutput::Vector(c), ProductOutput::Vector(p)) => {
                    let mut s = a.clone();
                    s.axpy(T::one(), b);
                    s.axpy(T::one(), c);
                    s.axpy(-T::one(), p);
                    (s.norm_l2().as_f64(), p.norm_l2().as_f64())
                }
                (ProductOutput::Scalar(a), ProductOutput::Scalar(b), ProductOutput::Scalar(c), ProductOutput::Scalar(p)) => {
                    let s: f64 = (0..a.coeffs().len())
                        .map(|i| (a.coeffs()[i] + b.coeffs()[i] + c.coeffs()[i] - p.coeffs()[i]).norm_sqr().as_f64())
                        .sum();
                    (s.sqrt(), p.norm_l2().as_f64())
                }
                _ => (f64::NAN, 1.0),
            }
        };
        let (r, p) = sum_minus(&self.t_u_v, &self.t_v_u, &self.remainder, &self.product);
        if p > 0.0 {
            r / p
        } else {
            r
        }
    }
}

struct Accum<T: Real> {
    kind: ProductKind,
    vec: Option<PhysicalField<T>>,
    scal: Vec<T>,
}

impl<T: Real> Accum<T> {
    fn new(kind: ProductKind, proto: &PhysicalField<T>) -> Self {
        let lat = proto.lattice();
        match kind {
            ProductKind::Dot => Self { kind, vec: None, scal: vec![T::zero(); lat.len()] },
            ProductKind::Cross => Self { kind, vec: Some(PhysicalField::zeros(lat)), scal: Vec::new() },
            ProductKind::TensorDivergence => Self { kind, vec: None, scal: Vec::new() },
        }
    }
}

/// Bony decomposition of the dealiased product of `u` and `v`.
///
/// Inputs are first restricted to the 2/3 band, exactly as in
/// [`crate::spectral::pointwise_product`], so the three pieces add up to the
/// dealiased product.
pub fn bony_split<T: Real>(
    part: &DyadicPartition,
    u: &SpectralField<T>,
    v: &SpectralField<T>,
    kind: ProductKind,
) -> Result<BonySplit<T>> {
    check_same(u.lattice(), v.lattice())?;
    let band = Band::TwoThirds;
    let lat = u.lattice().clone();
    let ut = u.truncated(band);
    let vt = v.truncated(band);
    let nb = part.len();
    let ublocks: Vec<SpectralField<T>> = part.blocks().map(|q| block_of(part, &ut, q)).collect();
    let vblocks: Vec<SpectralField<T>> = part.blocks().map(|q| block_of(part, &vt, q)).collect();

    // low-pass S_{q-1} = Σ_{j <= q-2} Δ_j, and Δ̃_q
    let mut su = Vec::with_capacity(nb);
    let mut sv = Vec::with_capacity(nb);
    let mut vtilde = Vec::with_capacity(nb);
    let mut acc_u = SpectralField::zeros(&lat);
    let mut acc_v = SpectralField::zeros(&lat);
    for i in 0..nb {
        if i >= 2 {
            acc_u.axpy(T::one(), &ublocks[i - 2]);
            acc_v.axpy(T::one(), &vblocks[i - 2]);
        }
        su.push(acc_u.clone());
        sv.push(acc_v.clone());
        let mut t = vblocks[i].clone();
        if i > 0 {
            t.axpy(T::one(), &vblocks[i - 1]);
        }
        if i + 1 < nb {
            t.axpy(T::one(), &vblocks[i + 1]);
        }
        vtilde.push(t);
    }

    let mut pieces = Vec::with_capacity(3);
    for which in 0..3 {
        let mut lefts = Vec::with_capacity(nb);
        let mut rights = Vec::with_capacity(nb);
        for i in 0..nb {
            let (l, r) = match which {
                0 => (&su[i], &vblocks[i]),
                1 => (&ublocks[i], &sv[i]),
                _ => (&ublocks[i], &vtilde[i]),
            };
            lefts.push(l);
            rights.push(r);
        }
        pieces.push(sum_products(&lefts, &rights, kind, band)?);
    }
    let product = crate::spectral::product_on_band(&ut, &vt, kind, band)?;
    let remainder = pieces.pop().expect("three pieces");
    let t_v_u = pieces.pop().expect("three pieces");
    let t_u_v = pieces.pop().expect("three pieces");
    Ok(BonySplit { t_u_v, t_v_u, remainder, product })
}

/// `Σ_i a_i ∘ b_i`, accumulated on the grid and analyzed once.
fn sum_products<T: Real>(
    a: &[&SpectralField<T>],
    b: &[&SpectralField<T>],
    kind: ProductKind,
    band: Band,
) -> Result<ProductOutput<T>> {
    let lat = a[0].lattice().clone();
    let zero = PhysicalField::zeros(&lat);
    let mut acc = Accum::new(kind, &zero);
    let mut tdiv = SpectralField::zeros(&lat);
    for (x, y) in a.iter().zip(b) {
        if x.max_abs() == T::zero() || y.max_abs() == T::zero() {
            continue;
        }
        let p = to_physical_many(&[*x, *y]);
        match acc.kind {
            ProductKind::Cross => {
                let c = phys_cross(&p[0], &p[1]);
                acc.vec.as_mut().expect("cross accumulator").axpy(T::one(), &c);
            }
            ProductKind::Dot => {
                for (s, d) in acc.scal.iter_mut().zip(phys_dot(&p[0], &p[1])) {
                    *s = *s + d;
                }
            }
            ProductKind::TensorDivergence => {
                tdiv.axpy(T::one(), &tensor_divergence_phys(&p[0], &p[1], band));
            }
        }
    }
    Ok(match kind {
        ProductKind::Cross => ProductOutput::Vector(analyze(&acc.vec.expect("cross accumulator"), band)),
        ProductKind::TensorDivergence => ProductOutput::Vector(tdiv),
        ProductKind::Dot => {
            let mut c = forward_real(&lat, &[&acc.scal]).pop().unwrap_or_default();
            for (idx, z) in c.iter_mut().enumerate() {
                if idx == 0 || !lat.in_band(idx, band) {
                    *z = Default::default();
                }
            }
            ProductOutput::Scalar(ScalarField::from_coeffs(&lat, c)?)
        }
    })
}
