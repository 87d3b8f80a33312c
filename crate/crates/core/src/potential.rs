//! Smooth convex potentials f on K with gradient oracle and declared
//! Lipschitz (L over K) and smoothness (β) constants. The constants are
//! declared at construction and spot-verified empirically; the schedule
//! calculators consume them symbolically.

use crate::geometry::ConvexBody;
use crate::rng::{chain_rng, uniform_in_ball};
use crate::vecops::*;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum PotentialKind {
    Uniform,
    IsotropicGaussian { sigma: f64 },
    Quadratic { h: Vec<Vec<f64>>, c: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct Potential {
    kind: PotentialKind,
    lipschitz_l: f64,
    smooth_beta: f64,
}

impl Potential {
    /// f ≡ 0: the uniform distribution on K.
    pub fn uniform() -> Self {
        Potential { kind: PotentialKind::Uniform, lipschitz_l: 0.0, smooth_beta: 0.0 }
    }

    /// f(x) = |x|²/(2σ²). The gradient x/σ² is largest on the circumball,
    /// so L = R/σ²; β = 1/σ² everywhere.
    pub fn gaussian(sigma: f64, circumradius: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Invalid(format!("gaussian: sigma must be positive, got {sigma}")));
        }
        if !(circumradius > 0.0) || !circumradius.is_finite() {
            return Err(Error::Invalid("gaussian: circumradius must be positive".into()));
        }
        let beta = 1.0 / (sigma * sigma);
        Ok(Potential {
            kind: PotentialKind::IsotropicGaussian { sigma },
            lipschitz_l: circumradius * beta,
            smooth_beta: beta,
        })
    }

    /// f(x) = xᵀHx/2 + cᵀx with H symmetric PSD. β = λ_max(H) by power
    /// iteration; L uses the bound |Hx + c| ≤ β·R + |c| over the circumball.
    pub fn quadratic(h: Vec<Vec<f64>>, c: Vec<f64>, circumradius: f64) -> Result<Self> {
        let n = c.len();
        if h.len() != n || h.iter().any(|row| row.len() != n) || n == 0 {
            return Err(Error::Invalid("quadratic: H must be n×n matching c".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if (h[i][j] - h[j][i]).abs() > 1e-9 * (h[i][j].abs() + h[j][i].abs()).max(1.0) {
                    return Err(Error::Invalid("quadratic: H must be symmetric".into()));
                }
            }
        }
        let beta = power_iteration_max_eig(&h);
        // PSD spot check: xᵀHx ≥ 0 on random directions.
        let mut rng = chain_rng(0xC0FF_EE00);
        for _ in 0..100 {
            let x = uniform_in_ball(&mut rng, n, 1.0);
            let hx = mat_vec(&h, &x);
            if dot(&x, &hx) < -1e-9 * beta.max(1.0) {
                return Err(Error::Invalid("quadratic: H is not positive semidefinite".into()));
            }
        }
        let l = beta * circumradius + norm(&c);
        Ok(Potential { kind: PotentialKind::Quadratic { h, c }, lipschitz_l: l, smooth_beta: beta })
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn lipschitz_l(&self) -> f64 {
        self.lipschitz_l
    }

    pub fn smooth_beta(&self) -> f64 {
        self.smooth_beta
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            PotentialKind::Uniform => 0.0,
            PotentialKind::IsotropicGaussian { sigma } => norm_sq(x) / (2.0 * sigma * sigma),
            PotentialKind::Quadratic { h, c } => 0.5 * dot(x, &mat_vec(h, x)) + dot(c, x),
        }
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            PotentialKind::Uniform => vec![0.0; x.len()],
            PotentialKind::IsotropicGaussian { sigma } => scale(x, 1.0 / (sigma * sigma)),
            PotentialKind::Quadratic { h, c } => {
                let mut g = mat_vec(h, x);
                for i in 0..g.len() {
                    g[i] += c[i];
                }
                g
            }
        }
    }

    /// Central finite-difference check of the gradient at random interior
    /// points; returns the worst relative error. Deterministic (fixed
    /// internal seed): a verification tool, not a statistical test.
    pub fn check_grad(&self, body: &ConvexBody, samples: usize, h: f64) -> f64 {
        assert!(h > 0.0, "check_grad: step must be positive");
        let n = body.dim();
        let mut rng = chain_rng(0x5EED_F00D);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let x = uniform_in_ball(&mut rng, n, body.inradius() * 0.9);
            let g = self.grad(&x);
            for i in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (self.value(&xp) - self.value(&xm)) / (2.0 * h);
                let err = (fd - g[i]).abs() / g[i].abs().max(1.0);
                if err > worst {
                    worst = err;
                }
            }
        }
        worst
    }

    /// Verify the declared constants on random pairs in K:
    /// |∇f(x)| ≤ L·(1+1e-9) and |∇f(x)−∇f(y)| ≤ β|x−y|·(1+1e-9).
    pub fn verify_constants(&self, body: &ConvexBody, pairs: usize, seed: u64) -> Result<()> {
        let n = body.dim();
        let mut rng = chain_rng(seed);
        let slack = 1.0 + 1e-9;
        for _ in 0..pairs {
            let x = uniform_in_ball(&mut rng, n, body.inradius());
            let y = uniform_in_ball(&mut rng, n, body.inradius());
            let gx = self.grad(&x);
            let gy = self.grad(&y);
            if norm(&gx) > self.lipschitz_l * slack + 1e-12 {
                return Err(Error::Invalid(format!(
                    "declared L = {} violated: |∇f| = {}",
                    self.lipschitz_l,
                    norm(&gx)
                )));
            }
            let d = dist(&x, &y);
            if dist(&gx, &gy) > self.smooth_beta * d * slack + 1e-12 {
                return Err(Error::Invalid(format!(
                    "declared β = {} violated on a pair at distance {d}",
                    self.smooth_beta
                )));
            }
        }
        Ok(())
    }
}

fn mat_vec(h: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    h.iter().map(|row| dot(row, x)).collect()
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration with a
/// fixed deterministic start.
fn power_iteration_max_eig(h: &[Vec<f64>]) -> f64 {
    let n = h.len();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 0.01).collect();
    let nv = norm(&v);
    v = scale(&v, 1.0 / nv);
    let mut lambda = 0.0;
    for _ in 0..200 {
        let hv = mat_vec(h, &v);
        let nh = norm(&hv);
        if nh < 1e-300 {
            return 0.0;
        }
        lambda = dot(&v, &hv);
        v = scale(&hv, 1.0 / nh);
    }
    lambda.max(0.0)
}
