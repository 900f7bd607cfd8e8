//! Seeded checks shared by the property tests and the acceptance suite.
#![allow(dead_code)]

use faer::linalg::solvers::Solve;
use faer::Mat;
use lowrank_recovery::linalg::{
    cg_solve, cg_solve_projected, matrix_norm, soft_threshold, sv_shrink, svd, CgOptions, DenseMatrix, FnMap,
    LinearMap, NormKind, SampledTangentMap, Side, TangentBasis, DEFAULT_RANK_CUTOFF,
};
use lowrank_recovery::problem::{gen_lowrank, sample_support, PortableRng, SamplingModel};

/// `a ≤ b` up to relative slack.
pub fn le_rel(a: f64, b: f64, slack: f64) -> bool {
    a <= b + slack * a.abs().max(b.abs())
}

/// Random shape up to `max_dim` on each side; rank is either full or a random
/// factorization rank, and the overall scale spans several decades.
pub fn random_matrix(rng: &mut PortableRng, max_dim: usize) -> DenseMatrix {
    let n1 = 1 + (rng.next_u64() % max_dim as u64) as usize;
    let n2 = 1 + (rng.next_u64() % max_dim as u64) as usize;
    let scale = 10f64.powf(4.0 * rng.uniform() - 2.0);
    let x = if rng.uniform() < 0.5 {
        rng.gaussian_matrix(n1, n2)
    } else {
        let r = 1 + (rng.next_u64() % n1.min(n2) as u64) as usize;
        gen_lowrank(n1, n2, r, rng.next_u64()).unwrap()
    };
    x.scale(scale)
}

#[derive(Debug, Default)]
pub struct CheckTally {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckTally {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Both norm chains on `count` random matrices.
pub fn norm_chain(count: usize, seed: u64, slack: f64) -> CheckTally {
    let mut rng = PortableRng::seed_from_u64(seed);
    let mut tally = CheckTally::default();
    for k in 0..count {
        let x = random_matrix(&mut rng, 12);
        let (n1, n2) = x.shape();
        let inf = x.max_abs();
        let fro = x.frobenius_norm();
        let l1 = x.l1_norm();
        let spec = matrix_norm(&x, NormKind::Spectral).unwrap();
        let nuc = matrix_norm(&x, NormKind::Nuclear).unwrap();
        let rank = svd(&x, DEFAULT_RANK_CUTOFF).unwrap().rank() as f64;
        let entry = [inf, fro, l1, (n1 * n2) as f64 * inf];
        let spectral = [spec, fro, nuc, rank.sqrt() * fro, rank * spec];
        for chain in [&entry[..], &spectral[..]] {
            for w in chain.windows(2) {
                tally.expect(le_rel(w[0], w[1], slack), || format!("matrix {k}: {chain:?}"));
            }
        }
    }
    tally
}

/// Hölder-type duality pairs and the nuclear norm attained by `U Vᵀ`.
pub fn duality(count: usize, seed: u64, slack: f64, attain_tol: f64) -> CheckTally {
    let mut rng = PortableRng::seed_from_u64(seed);
    let mut tally = CheckTally::default();
    for k in 0..count {
        let x = random_matrix(&mut rng, 12);
        let y = rng.gaussian_matrix(x.rows(), x.cols());
        let xy = x.dot(&y);
        let spec_x = matrix_norm(&x, NormKind::Spectral).unwrap();
        let nuc_y = matrix_norm(&y, NormKind::Nuclear).unwrap();
        tally.expect(le_rel(xy, spec_x * nuc_y, slack), || {
            format!("pair {k}: spectral/nuclear")
        });
        tally.expect(le_rel(xy, x.l1_norm() * y.max_abs(), slack), || {
            format!("pair {k}: l1/linf")
        });
        let f = svd(&x, DEFAULT_RANK_CUTOFF).unwrap();
        let nuc_x = matrix_norm(&x, NormKind::Nuclear).unwrap();
        let attained = x.dot(&f.uv_t());
        tally.expect((attained - nuc_x).abs() <= attain_tol * nuc_x, || {
            format!("matrix {k}: <X, UV*> = {attained}, nuclear = {nuc_x}")
        });
    }
    tally
}

/// Largest violation of idempotence and self-adjointness of `P_Ω`, `P_T`, `P_T⊥`,
/// relative to the input norms, over `trials` random instances. Also checks
/// `P_T + P_T⊥ = I` and `‖P_Ω X‖_F ≤ ‖X‖_F`; any failure of those two is returned as `∞`.
pub fn projector_algebra(trials: usize, seed: u64) -> f64 {
    let mut rng = PortableRng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n1 = 2 + (rng.next_u64() % 15) as usize;
        let n2 = 2 + (rng.next_u64() % 15) as usize;
        let r = 1 + (rng.next_u64() % n1.min(n2) as u64) as usize;
        let t = TangentBasis::of_matrix(&gen_lowrank(n1, n2, r, rng.next_u64()).unwrap(), DEFAULT_RANK_CUTOFF).unwrap();
        let omega = sample_support(n1, n2, SamplingModel::Bernoulli(rng.uniform()), rng.next_u64()).unwrap();
        let x = rng.gaussian_matrix(n1, n2);
        let y = rng.gaussian_matrix(n1, n2);
        let scale = x.frobenius_norm() * y.frobenius_norm();

        let maps: [&dyn Fn(&DenseMatrix) -> DenseMatrix; 3] = [
            &|m| lowrank_recovery::linalg::project_omega(m, &omega).unwrap(),
            &|m| t.project(m, Side::T).unwrap(),
            &|m| t.project(m, Side::TPerp).unwrap(),
        ];
        for p in maps {
            let px = p(&x);
            worst = worst.max((&p(&px) - &px).frobenius_norm() / x.frobenius_norm());
            worst = worst.max((px.dot(&y) - x.dot(&p(&y))).abs() / scale);
        }
        let split = &t.project(&x, Side::T).unwrap() + &t.project(&x, Side::TPerp).unwrap();
        if (&split - &x).max_abs() > 4.0 * f64::EPSILON * x.max_abs() {
            return f64::INFINITY;
        }
        if lowrank_recovery::linalg::project_omega(&x, &omega)
            .unwrap()
            .frobenius_norm()
            > x.frobenius_norm()
        {
            return f64::INFINITY;
        }
    }
    worst
}

#[derive(Debug, Default)]
pub struct ProxTally {
    pub sv_shrink_failures: usize,
    pub soft_threshold_failures: usize,
    pub probes_each: usize,
}

/// Compares each prox objective at its minimizer against `directions` seeded perturbations
/// for every `ε ∈ {1e−3, 1e−2}`.
pub fn prox_optimality(directions: usize, seed: u64) -> ProxTally {
    let mut rng = PortableRng::seed_from_u64(seed);
    let z = rng.gaussian_matrix(8, 6).scale(3.0);
    let theta = 1.5;
    let nuc = |m: &DenseMatrix| matrix_norm(m, NormKind::Nuclear).unwrap();
    let sv_obj = |x: &DenseMatrix| theta * nuc(x) + 0.5 * (x - &z).frobenius_norm().powi(2);
    let l1_obj = |x: &DenseMatrix| theta * x.l1_norm() + 0.5 * (x - &z).frobenius_norm().powi(2);
    let x_sv = sv_shrink(&z, theta).unwrap();
    let x_l1 = soft_threshold(&z, theta);
    let (f_sv, f_l1) = (sv_obj(&x_sv), l1_obj(&x_l1));

    let mut tally = ProxTally::default();
    for _ in 0..directions {
        let g = rng.gaussian_matrix(8, 6);
        let g = g.scale(1.0 / g.frobenius_norm());
        for eps in [1e-3, 1e-2] {
            let mut moved = x_sv.clone();
            moved.axpy(eps, &g);
            if sv_obj(&moved) < f_sv {
                tally.sv_shrink_failures += 1;
            }
            let mut moved = x_l1.clone();
            moved.axpy(eps, &g);
            if l1_obj(&moved) < f_l1 {
                tally.soft_threshold_failures += 1;
            }
            tally.probes_each += 1;
        }
    }
    tally
}

/// Dense matrix of a map on `n1 x n2` matrices, columns indexed by row-major position.
pub fn matricize(map: &dyn Fn(&DenseMatrix) -> DenseMatrix, n1: usize, n2: usize) -> Mat<f64> {
    let n = n1 * n2;
    let mut a = Mat::zeros(n, n);
    for k in 0..n {
        let e = DenseMatrix::from_fn(n1, n2, |i, j| if i * n2 + j == k { 1.0 } else { 0.0 });
        for (row, v) in map(&e).as_slice().iter().enumerate() {
            a[(row, k)] = *v;
        }
    }
    a
}

fn dense_solve(a: Mat<f64>, rhs: &DenseMatrix) -> DenseMatrix {
    let b = Mat::from_fn(rhs.as_slice().len(), 1, |i, _| rhs.as_slice()[i]);
    let x = a.partial_piv_lu().solve(&b);
    DenseMatrix::from_fn(rhs.rows(), rhs.cols(), |i, j| x[(i * rhs.cols() + j, 0)])
}

/// Relative gap between CG and the dense inverse for `(P_T P_Ω P_T)⁻¹ P_T M` on a 10x10
/// instance, and for a random symmetric positive definite operator.
pub fn cg_dense_gaps(seed: u64) -> (f64, f64) {
    let (n1, n2) = (10, 10);
    let m = gen_lowrank(n1, n2, 2, seed).unwrap();
    let omega = sample_support(n1, n2, SamplingModel::Bernoulli(0.7), seed + 1).unwrap();
    let t = TangentBasis::of_matrix(&m, DEFAULT_RANK_CUTOFF).unwrap();
    let map = SampledTangentMap {
        tangent: &t,
        omega: &omega,
    };
    let opts = CgOptions {
        tol: 1e-13,
        max_iters: 1000,
    };
    let rhs = t.project(&m, Side::T).unwrap();
    let cg = cg_solve_projected(&map, &rhs, &opts, |x| t.project(x, Side::T).unwrap()).unwrap();
    // Identity on T⊥ makes the matricized operator invertible without changing the T block.
    let dense = matricize(&|x| &map.apply(x) + &t.project(x, Side::TPerp).unwrap(), n1, n2);
    let exact = dense_solve(dense, &rhs);
    let gap_t = (&cg.x - &exact).frobenius_norm() / exact.frobenius_norm();

    let mut rng = PortableRng::seed_from_u64(seed + 2);
    let c = rng.gaussian_matrix(n1 * n2, n1 * n2);
    let q = c.tr_matmul(&c).scale(1.0 / (n1 * n2) as f64);
    let apply = move |x: &DenseMatrix| {
        let v = q.matmul(&DenseMatrix::from_row_major(n1 * n2, 1, x.as_slice().to_vec()).unwrap());
        let mut out = DenseMatrix::from_row_major(n1, n2, v.into_vec()).unwrap();
        out.axpy(0.5, x);
        out
    };
    let spd = FnMap {
        input_shape: (n1, n2),
        output_shape: (n1, n2),
        forward: &apply,
        adjoint: &apply,
        self_adjoint: true,
    };
    let b = rng.gaussian_matrix(n1, n2);
    let cg = cg_solve(&spd, &b, &opts).unwrap();
    let exact = dense_solve(matricize(&apply, n1, n2), &b);
    let gap_spd = (&cg.x - &exact).frobenius_norm() / exact.frobenius_norm();
    (gap_t, gap_spd)
}
