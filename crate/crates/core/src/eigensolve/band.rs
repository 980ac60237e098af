use crate::lattice::HamiltonianMatrix;

/// Lower band of a symmetric matrix, used for shift-and-count via LDLᵀ
/// inertia (Sylvester's law) when dense tridiagonalization is too large.
#[derive(Debug, Clone)]
pub(crate) struct BandMatrix {
    n: usize,
    width: usize,
    /// `band[i * (width + 1) + (i - j)] = A[i][j]` for `i - width <= j <= i`.
    band: Vec<f64>,
    pivot_floor: f64,
}

impl BandMatrix {
    pub(crate) fn from_sparse(h: &HamiltonianMatrix) -> Self {
        let n = h.dimension();
        let width = h.bandwidth();
        let stride = width + 1;
        let mut band = vec![0.0; n * stride];
        let mut amax = 0.0f64;
        for i in 0..n {
            for (j, v) in h.row(i) {
                amax = amax.max(v.abs());
                if j <= i {
                    band[i * stride + (i - j)] = v;
                }
            }
        }
        Self {
            n,
            width,
            band,
            pivot_floor: f64::EPSILON * amax.max(f64::MIN_POSITIVE),
        }
    }

    /// Number of eigenvalues `<= e`, from the negative pivots of `e·I - A`.
    pub(crate) fn count_below(&self, e: f64) -> usize {
        let stride = self.width + 1;
        let mut w: Vec<f64> = self.band.iter().map(|v| -v).collect();
        for i in 0..self.n {
            w[i * stride] += e;
        }
        let floor = self.pivot_floor.max(f64::EPSILON * e.abs());
        let mut above = 0;
        for j in 0..self.n {
            let mut pivot = w[j * stride];
            if pivot.abs() < floor {
                pivot = floor;
            }
            if pivot < 0.0 {
                above += 1;
            }
            let last = (j + self.width).min(self.n - 1);
            for i in j + 1..=last {
                let wij = w[i * stride + (i - j)];
                if wij == 0.0 {
                    continue;
                }
                let f = wij / pivot;
                for k in j + 1..=i {
                    let wkj = w[k * stride + (k - j)];
                    w[i * stride + (i - k)] -= f * wkj;
                }
            }
        }
        self.n - above
    }
}
