//! Independent reference implementations used only by the integration tests.
#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use psi_monotones::graph::{Parity, PsiGraph};
use psi_monotones::PureState;

pub type C64 = Complex<f64>;

/// Row-major flat index of a multi-index.
pub fn flat(dims: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

/// Brute-force value of a graph invariant.
///
/// Every ket vertex is given a full multi-index; each bra vertex then reads
/// its label-`a` index off its label-`a` neighbor. The sum runs over all
/// ket assignments with a depth-first nested loop, multiplying in each bra
/// factor as soon as all of its neighbors are fixed.
pub fn naive_invariant(g: &PsiGraph, psi: &PureState) -> C64 {
    let dims = psi.dims();
    let q = dims.len();
    assert_eq!(g.party_count(), q);
    let n = g.vertex_count();
    let kets: Vec<usize> = (0..n).filter(|&v| g.parity(v) == Parity::Ket).collect();
    let bras: Vec<usize> = (0..n).filter(|&v| g.parity(v) == Parity::Bra).collect();
    let mut ket_pos = vec![usize::MAX; n];
    for (i, &k) in kets.iter().enumerate() {
        ket_pos[k] = i;
    }
    // nbr[b][a] = position of the ket joined to bra b by label a
    let mut nbr = vec![vec![usize::MAX; q]; bras.len()];
    for e in g.edges() {
        let (k, b) = if g.parity(e.u) == Parity::Ket { (e.u, e.v) } else { (e.v, e.u) };
        let bi = bras.iter().position(|&x| x == b).unwrap();
        nbr[bi][e.label] = ket_pos[k];
    }
    // bras grouped by the depth at which they become complete
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); kets.len()];
    for (bi, row) in nbr.iter().enumerate() {
        ready[*row.iter().max().unwrap()].push(bi);
    }
    let total: usize = dims.iter().product();
    // place[a][x]: contribution of party a's digit of ket index x to a flat index
    let mut place = vec![vec![0usize; total]; q];
    for x in 0..total {
        let (mut rem, mut stride) = (x, 1);
        for a in (0..q).rev() {
            place[a][x] = (rem % dims[a]) * stride;
            rem /= dims[a];
            stride *= dims[a];
        }
    }
    // own[bi][x]: the part of bra bi's flat index fixed by the ket assigned last
    let own: Vec<Vec<usize>> = nbr
        .iter()
        .map(|row| {
            let last = *row.iter().max().unwrap();
            (0..total)
                .map(|x| (0..q).filter(|&a| row[a] == last).map(|a| place[a][x]).sum())
                .collect()
        })
        .collect();
    let ctx = Naive {
        amps: psi.amps(),
        total,
        place: &place,
        nbr: &nbr,
        own: &own,
        ready: &ready,
    };
    let mut assign = vec![0usize; kets.len()];
    ctx.sum(0, C64::new(1.0, 0.0), &mut assign)
}

struct Naive<'a> {
    amps: &'a [C64],
    total: usize,
    place: &'a [Vec<usize>],
    nbr: &'a [Vec<usize>],
    own: &'a [Vec<usize>],
    ready: &'a [Vec<usize>],
}

impl Naive<'_> {
    fn sum(&self, depth: usize, acc: C64, assign: &mut [usize]) -> C64 {
        // index contributions from kets fixed above this depth
        let base: Vec<(usize, usize)> = self.ready[depth]
            .iter()
            .map(|&bi| {
                let fixed: usize = self.nbr[bi]
                    .iter()
                    .enumerate()
                    .filter(|&(_, &k)| k != depth)
                    .map(|(a, &k)| self.place[a][assign[k]])
                    .sum();
                (bi, fixed)
            })
            .collect();
        let mut s = C64::new(0.0, 0.0);
        for choice in 0..self.total {
            assign[depth] = choice;
            let mut w = acc * self.amps[choice];
            for &(bi, fixed) in &base {
                w *= self.amps[fixed + self.own[bi][choice]].conj();
            }
            if depth + 1 == assign.len() {
                s += w;
            } else if w != C64::new(0.0, 0.0) {
                s += self.sum(depth + 1, w, assign);
            }
        }
        s
    }
}

/// `ρ` on the parties in `keep` (ascending), built entry by entry.
pub fn naive_reduced(psi: &PureState, keep: &[usize]) -> DMatrix<C64> {
    let dims = psi.dims();
    let rest: Vec<usize> = (0..dims.len()).filter(|a| !keep.contains(a)).collect();
    let dk: usize = keep.iter().map(|&a| dims[a]).product();
    let dr: usize = rest.iter().map(|&a| dims[a]).product();
    let split = |mut x: usize, parties: &[usize]| -> Vec<usize> {
        let mut out = vec![0; parties.len()];
        for (i, &a) in parties.iter().enumerate().rev() {
            out[i] = x % dims[a];
            x /= dims[a];
        }
        out
    };
    let full = |ki: &[usize], ri: &[usize]| -> usize {
        let mut idx = vec![0; dims.len()];
        for (i, &a) in keep.iter().enumerate() {
            idx[a] = ki[i];
        }
        for (i, &a) in rest.iter().enumerate() {
            idx[a] = ri[i];
        }
        flat(dims, &idx)
    };
    let amps = psi.amps();
    DMatrix::from_fn(dk, dk, |r, c| {
        let (kr, kc) = (split(r, keep), split(c, keep));
        (0..dr)
            .map(|x| {
                let ri = split(x, &rest);
                amps[full(&kr, &ri)] * amps[full(&kc, &ri)].conj()
            })
            .sum()
    })
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Schmidt coefficients squared across `side | rest`, descending.
pub fn schmidt(psi: &PureState, side: &[usize]) -> Vec<f64> {
    eigenvalues(&naive_reduced(psi, side)).into_iter().map(|x| x.max(0.0)).collect()
}

pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
