use crate::linalg::project::project_omega_unchecked;
use crate::linalg::{DenseMatrix, SupportSet, TangentBasis};
use crate::problem::rng::PortableRng;

/// A linear map between matrix spaces.
pub trait LinearMap: Send + Sync {
    /// Shape of the input matrices.
    fn input_shape(&self) -> (usize, usize);

    /// Shape of the output matrices.
    fn output_shape(&self) -> (usize, usize);

    fn apply(&self, x: &DenseMatrix) -> DenseMatrix;

    fn apply_adjoint(&self, y: &DenseMatrix) -> DenseMatrix;

    fn is_self_adjoint(&self) -> bool {
        false
    }
}

/// `α I`.
#[derive(Clone, Debug)]
pub struct ScaledIdentity {
    pub shape: (usize, usize),
    pub alpha: f64,
}

impl ScaledIdentity {
    pub fn new(shape: (usize, usize)) -> Self {
        Self { shape, alpha: 1.0 }
    }
}

impl LinearMap for ScaledIdentity {
    fn input_shape(&self) -> (usize, usize) {
        self.shape
    }

    fn output_shape(&self) -> (usize, usize) {
        self.shape
    }

    fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        x.scale(self.alpha)
    }

    fn apply_adjoint(&self, y: &DenseMatrix) -> DenseMatrix {
        y.scale(self.alpha)
    }

    fn is_self_adjoint(&self) -> bool {
        true
    }
}

/// `P_Ω`.
#[derive(Clone, Copy, Debug)]
pub struct OmegaProjector<'a>(pub &'a SupportSet);

impl LinearMap for OmegaProjector<'_> {
    fn input_shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    fn output_shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        project_omega_unchecked(x, self.0)
    }

    fn apply_adjoint(&self, y: &DenseMatrix) -> DenseMatrix {
        project_omega_unchecked(y, self.0)
    }

    fn is_self_adjoint(&self) -> bool {
        true
    }
}

/// `P_T`.
#[derive(Clone, Copy, Debug)]
pub struct TangentProjector<'a>(pub &'a TangentBasis);

impl LinearMap for TangentProjector<'_> {
    fn input_shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    fn output_shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        self.0.project_unchecked(x)
    }

    fn apply_adjoint(&self, y: &DenseMatrix) -> DenseMatrix {
        self.0.project_unchecked(y)
    }

    fn is_self_adjoint(&self) -> bool {
        true
    }
}

/// `P_T P_Ω P_T`, positive definite on `T` when sampling is dense enough.
#[derive(Clone, Copy, Debug)]
pub struct SampledTangentMap<'a> {
    pub tangent: &'a TangentBasis,
    pub omega: &'a SupportSet,
}

impl LinearMap for SampledTangentMap<'_> {
    fn input_shape(&self) -> (usize, usize) {
        self.tangent.shape()
    }

    fn output_shape(&self) -> (usize, usize) {
        self.tangent.shape()
    }

    fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        let pt = self.tangent.project_unchecked(x);
        self.tangent
            .project_unchecked(&project_omega_unchecked(&pt, self.omega))
    }

    fn apply_adjoint(&self, y: &DenseMatrix) -> DenseMatrix {
        self.apply(y)
    }

    fn is_self_adjoint(&self) -> bool {
        true
    }
}

/// A map given by closures, for ad-hoc compositions.
pub struct FnMap<F, G> {
    pub input_shape: (usize, usize),
    pub output_shape: (usize, usize),
    pub forward: F,
    pub adjoint: G,
    pub self_adjoint: bool,
}

impl<F, G> LinearMap for FnMap<F, G>
where
    F: Fn(&DenseMatrix) -> DenseMatrix + Send + Sync,
    G: Fn(&DenseMatrix) -> DenseMatrix + Send + Sync,
{
    fn input_shape(&self) -> (usize, usize) {
        self.input_shape
    }

    fn output_shape(&self) -> (usize, usize) {
        self.output_shape
    }

    fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        (self.forward)(x)
    }

    fn apply_adjoint(&self, y: &DenseMatrix) -> DenseMatrix {
        (self.adjoint)(y)
    }

    fn is_self_adjoint(&self) -> bool {
        self.self_adjoint
    }
}

/// Largest relative gap `|⟨A X, Y⟩ − ⟨X, A* Y⟩| / (‖A X‖‖Y‖ + ‖X‖‖A* Y‖)` over seeded
/// Gaussian probes. A map flagged self-adjoint uses `apply` on both sides.
pub fn adjoint_gap(map: &dyn LinearMap, probes: usize, seed: u64) -> f64 {
    let mut rng = PortableRng::seed_from_u64(seed);
    let (ir, ic) = map.input_shape();
    let (or, oc) = map.output_shape();
    let mut worst = 0.0f64;
    for _ in 0..probes {
        let x = rng.gaussian_matrix(ir, ic);
        let y = rng.gaussian_matrix(or, oc);
        let ax = map.apply(&x);
        let aty = if map.is_self_adjoint() {
            map.apply(&y)
        } else {
            map.apply_adjoint(&y)
        };
        let scale = ax.frobenius_norm() * y.frobenius_norm() + x.frobenius_norm() * aty.frobenius_norm();
        if scale > 0.0 {
            worst = worst.max((ax.dot(&y) - x.dot(&aty)).abs() / scale);
        }
    }
    worst
}
