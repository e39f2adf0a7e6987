//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the search, the term evaluator or the Latin-square predicates of the
//! library under test.

#![allow(dead_code)]

/// Every `n x n` table over `0..n` whose rows and columns are permutations,
/// found by enumerating all `n^(n*n)` tables.
pub fn latin_squares_by_brute_force(n: usize) -> Vec<Vec<Vec<usize>>> {
    let cells = n * n;
    let total = n.pow(cells as u32);
    let mut out = Vec::new();
    for mut k in 0..total {
        let mut flat = vec![0; cells];
        for c in (0..cells).rev() {
            flat[c] = k % n;
            k /= n;
        }
        let rows: Vec<Vec<usize>> = flat.chunks(n).map(<[usize]>::to_vec).collect();
        if is_permutation_grid(&rows) {
            out.push(rows);
        }
    }
    out
}

fn is_permutation(values: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut v: Vec<usize> = values.collect();
    v.sort_unstable();
    v == (0..n).collect::<Vec<_>>()
}

fn is_permutation_grid(rows: &[Vec<usize>]) -> bool {
    let n = rows.len();
    rows.iter().all(|r| is_permutation(r.iter().copied(), n))
        && (0..n).all(|c| is_permutation(rows.iter().map(|r| r[c]), n))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Number of Latin squares of order `n`: every choice of permutation rows,
/// filtered by the column condition.
pub fn latin_square_count(n: usize) -> u64 {
    let perms = permutations(n);
    fn go(perms: &[Vec<usize>], n: usize, rows: &mut Vec<usize>) -> u64 {
        if rows.len() == n {
            return 1;
        }
        let mut total = 0;
        for (pi, p) in perms.iter().enumerate() {
            let clash = rows.iter().any(|&ri| (0..n).any(|c| perms[ri][c] == p[c]));
            if !clash {
                rows.push(pi);
                total += go(perms, n, rows);
                rows.pop();
            }
        }
        total
    }
    go(&perms, n, &mut Vec::new())
}

/// A raw table triple: `mul`, `ldiv`, `rdiv`, each row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub n: usize,
    pub cells: Vec<usize>,
}

impl Triple {
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cells[a * self.n + b]
    }
    pub fn ldiv(&self, a: usize, b: usize) -> usize {
        self.cells[self.n * self.n + a * self.n + b]
    }
    pub fn rdiv(&self, a: usize, b: usize) -> usize {
        self.cells[2 * self.n * self.n + a * self.n + b]
    }

    /// Bit `i` set when the `i`-th identity of A, C, B, D, T, R holds,
    /// each written out by hand as table lookups.
    pub fn satisfied_mask(&self) -> u8 {
        let n = self.n;
        let all = |f: &dyn Fn(usize, usize) -> bool| (0..n).all(|x| (0..n).all(|y| f(x, y)));
        let checks: [&dyn Fn(usize, usize) -> bool; 6] = [
            &|x, y| self.mul(x, self.ldiv(x, y)) == y,
            &|x, y| self.mul(self.rdiv(y, x), x) == y,
            &|x, y| self.ldiv(x, self.mul(x, y)) == y,
            &|x, y| self.rdiv(self.mul(y, x), x) == y,
            &|x, y| self.rdiv(x, self.ldiv(y, x)) == y,
            &|x, y| self.ldiv(self.rdiv(x, y), x) == y,
        ];
        let mut mask = 0;
        for (i, c) in checks.iter().enumerate() {
            if all(*c) {
                mask |= 1 << i;
            }
        }
        mask
    }

    pub fn rows(&self, table: usize) -> Vec<Vec<usize>> {
        let nn = self.n * self.n;
        self.cells[table * nn..(table + 1) * nn].chunks(self.n).map(<[usize]>::to_vec).collect()
    }
}

/// All `n^(3n^2)` triples in lexicographic order of the cell sequence
/// (`mul` row-major, then `ldiv`, then `rdiv`), with their satisfied masks.
pub fn all_triples(n: usize) -> Vec<(Triple, u8)> {
    let cells = 3 * n * n;
    let total = n.pow(cells as u32);
    (0..total)
        .map(|mut k| {
            let mut flat = vec![0; cells];
            for c in (0..cells).rev() {
                flat[c] = k % n;
                k /= n;
            }
            let t = Triple { n, cells: flat };
            let m = t.satisfied_mask();
            (t, m)
        })
        .collect()
}
