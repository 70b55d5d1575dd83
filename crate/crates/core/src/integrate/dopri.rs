//! Dormand–Prince 5(4) tableau with its 4th-order continuous extension.

/// Augmented state `[x, y, spent]`.
pub type Z = [f64; 3];

const C: [f64; 6] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0];

const A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
];

const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];

// Difference between the 5th and embedded 4th order weights, including the
// FSAL stage.
const E: [f64; 7] =
    [-71.0 / 57600.0, 0.0, 71.0 / 16695.0, -71.0 / 1920.0, 17253.0 / 339200.0, -22.0 / 525.0, 1.0 / 40.0];

// Dense output: z(t₀ + θh) = z₀ + h Σ_k (Σ_i K_i P[i][k]) θ^{k+1}.
const P: [[f64; 4]; 7] = [
    [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0],
    [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0],
    [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0],
    [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0],
    [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0],
];

/// One accepted step with its interpolant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    pub z0: Z,
    q: [Z; 4],
}

impl DenseStep {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Interpolated state at `t`, expected in `[t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> Z {
        let theta = (t - self.t0) / self.h;
        let mut out = self.z0;
        for (i, o) in out.iter_mut().enumerate() {
            let poly = theta * (self.q[0][i] + theta * (self.q[1][i] + theta * (self.q[2][i] + theta * self.q[3][i])));
            *o += self.h * poly;
        }
        out
    }
}

pub(crate) struct StepOutcome {
    pub z1: Z,
    pub k7: Z,
    pub err: f64,
    pub dense: DenseStep,
}

#[inline]
fn axpy(z: &Z, h: f64, terms: &[(f64, &Z)]) -> Z {
    let mut out = *z;
    for (i, o) in out.iter_mut().enumerate() {
        let s: f64 = terms.iter().map(|(c, k)| c * k[i]).sum();
        *o += h * s;
    }
    out
}

/// One trial step from `(t, z)` with first stage `k1 = f(t, z)`. `err` is the
/// RMS of the local error scaled by `atol + rtol·max(|z|, |z₁|)`.
pub(crate) fn step<F: FnMut(f64, &Z) -> Z>(
    f: &mut F,
    t: f64,
    z: &Z,
    k1: &Z,
    h: f64,
    rtol: f64,
    atol: f64,
) -> StepOutcome {
    let k2 = f(t + C[1] * h, &axpy(z, h, &[(A[1][0], k1)]));
    let k3 = f(t + C[2] * h, &axpy(z, h, &[(A[2][0], k1), (A[2][1], &k2)]));
    let k4 = f(t + C[3] * h, &axpy(z, h, &[(A[3][0], k1), (A[3][1], &k2), (A[3][2], &k3)]));
    let k5 = f(t + C[4] * h, &axpy(z, h, &[(A[4][0], k1), (A[4][1], &k2), (A[4][2], &k3), (A[4][3], &k4)]));
    let k6 = f(t + h, &axpy(z, h, &[(A[5][0], k1), (A[5][1], &k2), (A[5][2], &k3), (A[5][3], &k4), (A[5][4], &k5)]));
    let z1 = axpy(z, h, &[(B[0], k1), (B[2], &k3), (B[3], &k4), (B[4], &k5), (B[5], &k6)]);
    let k7 = f(t + h, &z1);

    let ks: [&Z; 7] = [k1, &k2, &k3, &k4, &k5, &k6, &k7];
    let mut sq = 0.0;
    for i in 0..3 {
        let e: f64 = h * ks.iter().zip(E.iter()).map(|(k, w)| w * k[i]).sum::<f64>();
        let sc = atol + rtol * z[i].abs().max(z1[i].abs());
        sq += (e / sc) * (e / sc);
    }
    let err = libm::sqrt(sq / 3.0);

    let mut q = [[0.0; 3]; 4];
    for (j, qj) in q.iter_mut().enumerate() {
        for (i, v) in qj.iter_mut().enumerate() {
            *v = ks.iter().zip(P.iter()).map(|(k, p)| k[i] * p[j]).sum();
        }
    }
    StepOutcome { z1, k7, err, dense: DenseStep { t0: t, h, z0: *z, q } }
}
