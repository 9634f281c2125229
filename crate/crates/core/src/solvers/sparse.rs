use alloc::vec;
use alloc::vec::Vec;

use crate::model::QuboProblem;

/// Symmetric adjacency view of a QUBO for O(degree) flip updates.
pub(crate) struct Csr {
    pub linear: Vec<f64>,
    pub offset: f64,
    start: Vec<usize>,
    nbr: Vec<u32>,
    weight: Vec<f64>,
}

impl Csr {
    pub fn from_qubo(p: &QuboProblem) -> Self {
        let n = p.n_vars();
        let mut degree = vec![0usize; n + 1];
        for c in p.quadratic() {
            degree[c.i + 1] += 1;
            degree[c.j + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let start = degree;
        let mut fill = start.clone();
        let nnz = start[n];
        let mut nbr = vec![0u32; nnz];
        let mut weight = vec![0.0; nnz];
        for c in p.quadratic() {
            nbr[fill[c.i]] = c.j as u32;
            weight[fill[c.i]] = c.value;
            fill[c.i] += 1;
            nbr[fill[c.j]] = c.i as u32;
            weight[fill[c.j]] = c.value;
            fill[c.j] += 1;
        }
        Self { linear: p.linear().to_vec(), offset: p.offset(), start, nbr, weight }
    }

    pub fn n(&self) -> usize {
        self.linear.len()
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.start[i]..self.start[i + 1];
        self.nbr[r.clone()].iter().map(|&j| j as usize).zip(self.weight[r].iter().copied())
    }

    /// `linear_i + Σ_j Q_ij x_j`: the energy change of turning bit `i` on.
    pub fn fields(&self, x: &[u8]) -> Vec<f64> {
        let mut f = self.linear.clone();
        for (i, fi) in f.iter_mut().enumerate() {
            for (j, w) in self.neighbors(i) {
                if x[j] == 1 {
                    *fi += w;
                }
            }
        }
        f
    }

    pub fn energy(&self, x: &[u8]) -> f64 {
        let mut e = self.offset;
        for i in 0..self.n() {
            if x[i] == 1 {
                e += self.linear[i];
                for (j, w) in self.neighbors(i) {
                    if j > i && x[j] == 1 {
                        e += w;
                    }
                }
            }
        }
        e
    }

    #[inline]
    pub fn delta(x: &[u8], f: &[f64], i: usize) -> f64 {
        if x[i] == 0 {
            f[i]
        } else {
            -f[i]
        }
    }

    /// Flips bit `i` and updates the neighbours' fields.
    #[inline]
    pub fn flip(&self, x: &mut [u8], f: &mut [f64], i: usize) {
        x[i] ^= 1;
        let r = self.start[i]..self.start[i + 1];
        if x[i] == 1 {
            for (&j, &w) in self.nbr[r.clone()].iter().zip(&self.weight[r]) {
                f[j as usize] += w;
            }
        } else {
            for (&j, &w) in self.nbr[r.clone()].iter().zip(&self.weight[r]) {
                f[j as usize] -= w;
            }
        }
    }
}

pub(crate) fn random_bits(rng: &mut impl rand::Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| u8::from(rng.random::<bool>())).collect()
}
