//! Finite algebras `(Q, *, \, /)` given by three Cayley tables on `0..n`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::identities::{self, Identity, Tag};
use crate::terms::{Assignment, Interpretation, Op};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("carrier size must be at least 1")]
    EmptyCarrier,
    #[error("{table} table has {rows} rows, expected {n}")]
    RowCount { table: &'static str, rows: usize, n: usize },
    #[error("{table} table row {row} has {len} entries, expected {n}")]
    RowLength { table: &'static str, row: usize, len: usize, n: usize },
    #[error("{table}[{row}][{col}] = {value} is outside 0..{n}")]
    OutOfRange { table: &'static str, row: usize, col: usize, value: usize, n: usize },
    #[error("not a Latin square: row {0} is not a permutation")]
    RowNotPermutation(usize),
    #[error("not a Latin square: column {0} is not a permutation")]
    ColumnNotPermutation(usize),
    #[error("identity {tag} fails at {witness}")]
    IdentityFails { tag: Tag, witness: Assignment },
    #[error("permutation of length {len} does not match carrier size {n}")]
    BadPermutation { len: usize, n: usize },
}

/// An `n x n` table with entries in `0..n`, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryTable {
    n: usize,
    cells: Vec<usize>,
}

impl BinaryTable {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> BinaryTable {
        let cells = (0..n * n).map(|k| f(k / n, k % n)).collect();
        BinaryTable { n, cells }
    }

    /// Builds a table from rows, checking shape and range.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<BinaryTable, AlgebraError> {
        Self::from_rows_named("table", rows)
    }

    fn from_rows_named(table: &'static str, rows: Vec<Vec<usize>>) -> Result<BinaryTable, AlgebraError> {
        let n = rows.len();
        if n == 0 {
            return Err(AlgebraError::EmptyCarrier);
        }
        let mut cells = Vec::with_capacity(n * n);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(AlgebraError::RowLength { table, row, len: r.len(), n });
            }
            for (col, value) in r.into_iter().enumerate() {
                if value >= n {
                    return Err(AlgebraError::OutOfRange { table, row, col, value, n });
                }
                cells.push(value);
            }
        }
        Ok(BinaryTable { n, cells })
    }

    pub(crate) fn from_cells(n: usize, cells: Vec<usize>) -> BinaryTable {
        debug_assert_eq!(cells.len(), n * n);
        debug_assert!(cells.iter().all(|&c| c < n));
        BinaryTable { n, cells }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> usize {
        self.cells[a * self.n + b]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.cells.chunks(self.n).map(<[usize]>::to_vec).collect()
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    fn is_permutation(&self, it: impl Iterator<Item = usize>) -> bool {
        let mut seen = vec![false; self.n];
        for v in it {
            if std::mem::replace(&mut seen[v], true) {
                return false;
            }
        }
        true
    }

    fn first_bad_row(&self) -> Option<usize> {
        (0..self.n).find(|&r| !self.is_permutation((0..self.n).map(|c| self.get(r, c))))
    }

    fn first_bad_column(&self) -> Option<usize> {
        (0..self.n).find(|&c| !self.is_permutation((0..self.n).map(|r| self.get(r, c))))
    }

    /// Every left translation `y -> a*y` is a bijection (rows are permutations).
    pub fn left_translations_bijective(&self) -> bool {
        self.first_bad_row().is_none()
    }

    /// Every right translation `x -> x*a` is a bijection (columns are permutations).
    pub fn right_translations_bijective(&self) -> bool {
        self.first_bad_column().is_none()
    }

    pub fn is_latin(&self) -> bool {
        self.left_translations_bijective() && self.right_translations_bijective()
    }

    /// Relabels elements by `perm`: the result maps `perm[a], perm[b]` to `perm[a*b]`.
    pub fn conjugate(&self, perm: &[usize]) -> BinaryTable {
        let mut cells = vec![0; self.n * self.n];
        for a in 0..self.n {
            for b in 0..self.n {
                cells[perm[a] * self.n + perm[b]] = perm[self.get(a, b)];
            }
        }
        BinaryTable { n: self.n, cells }
    }
}

impl fmt::Debug for BinaryTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.cells.chunks(self.n)).finish()
    }
}

pub fn is_latin(t: &BinaryTable) -> bool {
    t.is_latin()
}

pub fn left_translations_bijective(t: &BinaryTable) -> bool {
    t.left_translations_bijective()
}

pub fn right_translations_bijective(t: &BinaryTable) -> bool {
    t.right_translations_bijective()
}

/// Three Cayley tables over the carrier `0..n`.
///
/// `ldiv` is indexed `ldiv[x][y] = x\y`; `rdiv` is indexed `rdiv[y][x] = y/x`.
/// No Latin constraint is imposed: arbitrary table triples are valid values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AlgebraJson", into = "AlgebraJson")]
pub struct FiniteAlgebra {
    n: usize,
    mul: BinaryTable,
    ldiv: BinaryTable,
    rdiv: BinaryTable,
}

impl FiniteAlgebra {
    pub fn new(mul: BinaryTable, ldiv: BinaryTable, rdiv: BinaryTable) -> Result<FiniteAlgebra, AlgebraError> {
        let n = mul.order();
        for (table, t) in [("ldiv", &ldiv), ("rdiv", &rdiv)] {
            if t.order() != n {
                return Err(AlgebraError::RowCount { table, rows: t.order(), n });
            }
        }
        Ok(FiniteAlgebra { n, mul, ldiv, rdiv })
    }

    /// The one-element algebra.
    pub fn trivial() -> FiniteAlgebra {
        let t = BinaryTable::from_fn(1, |_, _| 0);
        FiniteAlgebra { n: 1, mul: t.clone(), ldiv: t.clone(), rdiv: t }
    }

    pub fn from_fns(
        n: usize,
        mul: impl Fn(usize, usize) -> usize,
        ldiv: impl Fn(usize, usize) -> usize,
        rdiv: impl Fn(usize, usize) -> usize,
    ) -> FiniteAlgebra {
        FiniteAlgebra {
            n,
            mul: BinaryTable::from_fn(n, mul),
            ldiv: BinaryTable::from_fn(n, ldiv),
            rdiv: BinaryTable::from_fn(n, rdiv),
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mul(&self) -> &BinaryTable {
        &self.mul
    }

    pub fn ldiv(&self) -> &BinaryTable {
        &self.ldiv
    }

    pub fn rdiv(&self) -> &BinaryTable {
        &self.rdiv
    }

    pub fn table(&self, op: Op) -> &BinaryTable {
        match op {
            Op::Mul => &self.mul,
            Op::LDiv => &self.ldiv,
            Op::RDiv => &self.rdiv,
        }
    }

    /// Relabels all three tables by the same permutation of the carrier.
    pub fn conjugate(&self, perm: &[usize]) -> Result<FiniteAlgebra, AlgebraError> {
        let valid = perm.len() == self.n && {
            let mut sorted = perm.to_vec();
            sorted.sort_unstable();
            sorted.iter().enumerate().all(|(i, &v)| i == v)
        };
        if !valid {
            return Err(AlgebraError::BadPermutation { len: perm.len(), n: self.n });
        }
        Ok(FiniteAlgebra {
            n: self.n,
            mul: self.mul.conjugate(perm),
            ldiv: self.ldiv.conjugate(perm),
            rdiv: self.rdiv.conjugate(perm),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("algebra serializes")
    }
}

impl Interpretation for FiniteAlgebra {
    fn order(&self) -> usize {
        self.n
    }

    #[inline]
    fn apply(&self, op: Op, a: usize, b: usize) -> usize {
        self.table(op).get(a, b)
    }
}

#[derive(Serialize, Deserialize)]
struct AlgebraJson {
    n: usize,
    mul: Vec<Vec<usize>>,
    ldiv: Vec<Vec<usize>>,
    rdiv: Vec<Vec<usize>>,
}

impl From<FiniteAlgebra> for AlgebraJson {
    fn from(a: FiniteAlgebra) -> AlgebraJson {
        AlgebraJson {
            n: a.n,
            mul: a.mul.rows(),
            ldiv: a.ldiv.rows(),
            rdiv: a.rdiv.rows(),
        }
    }
}

impl TryFrom<AlgebraJson> for FiniteAlgebra {
    type Error = AlgebraError;

    fn try_from(j: AlgebraJson) -> Result<FiniteAlgebra, AlgebraError> {
        if j.n == 0 {
            return Err(AlgebraError::EmptyCarrier);
        }
        let mut tables = Vec::with_capacity(3);
        for (table, rows) in [("mul", j.mul), ("ldiv", j.ldiv), ("rdiv", j.rdiv)] {
            if rows.len() != j.n {
                return Err(AlgebraError::RowCount { table, rows: rows.len(), n: j.n });
            }
            tables.push(BinaryTable::from_rows_named(table, rows)?);
        }
        let rdiv = tables.pop().unwrap();
        let ldiv = tables.pop().unwrap();
        let mul = tables.pop().unwrap();
        Ok(FiniteAlgebra { n: j.n, mul, ldiv, rdiv })
    }
}

/// Completes a Latin square to an algebra by solving for both divisions.
///
/// `ldiv[a][b]` is the unique `y` with `a*y = b`, and `rdiv[b][a]` is the
/// unique `x` with `x*a = b`.
pub fn from_latin_square(t: &BinaryTable) -> Result<FiniteAlgebra, AlgebraError> {
    if let Some(r) = t.first_bad_row() {
        return Err(AlgebraError::RowNotPermutation(r));
    }
    if let Some(c) = t.first_bad_column() {
        return Err(AlgebraError::ColumnNotPermutation(c));
    }
    let n = t.order();
    let mut ldiv = vec![0; n * n];
    let mut rdiv = vec![0; n * n];
    for a in 0..n {
        for y in 0..n {
            let b = t.get(a, y);
            ldiv[a * n + b] = y;
        }
    }
    for x in 0..n {
        for a in 0..n {
            let b = t.get(x, a);
            rdiv[b * n + a] = x;
        }
    }
    Ok(FiniteAlgebra {
        n,
        mul: t.clone(),
        ldiv: BinaryTable::from_cells(n, ldiv),
        rdiv: BinaryTable::from_cells(n, rdiv),
    })
}

/// Checks that an algebra satisfying `{A, C, B, D}` has a Latin multiplication.
///
/// Errors when the precondition fails, naming the first failing identity.
pub fn mul_of_quasigroup_is_latin(alg: &FiniteAlgebra) -> Result<bool, AlgebraError> {
    for tag in [Tag::A, Tag::C, Tag::B, Tag::D] {
        if let Some(witness) = identities::violating_assignment(&Identity::canonical(tag), alg) {
            return Err(AlgebraError::IdentityFails { tag, witness });
        }
    }
    Ok(alg.mul.is_latin())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[&[usize]]) -> BinaryTable {
        BinaryTable::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn latin_predicates() {
        assert!(table(&[&[0]]).is_latin());
        let xor = table(&[&[0, 1], &[1, 0]]);
        assert!(xor.is_latin());
        assert!(xor.left_translations_bijective() && xor.right_translations_bijective());

        let proj = table(&[&[0, 1], &[0, 1]]);
        assert!(!proj.is_latin());
        assert!(proj.left_translations_bijective());
        assert!(!proj.right_translations_bijective());

        let constant = table(&[&[0, 0], &[0, 0]]);
        assert!(!constant.left_translations_bijective());
        assert!(!constant.right_translations_bijective());
    }

    #[test]
    fn latin_square_of_order_one() {
        let alg = from_latin_square(&table(&[&[0]])).unwrap();
        assert_eq!(alg, FiniteAlgebra::trivial());
    }

    #[test]
    fn xor_divisions_coincide_with_multiplication() {
        let xor = table(&[&[0, 1], &[1, 0]]);
        let alg = from_latin_square(&xor).unwrap();
        assert_eq!(alg.mul(), &xor);
        assert_eq!(alg.ldiv(), &xor);
        assert_eq!(alg.rdiv(), &xor);
    }

    #[test]
    fn cyclic_three_divisions_are_subtraction() {
        let z3 = BinaryTable::from_fn(3, |a, b| (a + b) % 3);
        let alg = from_latin_square(&z3).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(alg.ldiv().get(a, b), (b + 3 - a) % 3);
                assert_eq!(alg.rdiv().get(b, a), (b + 3 - a) % 3);
            }
        }
    }

    #[test]
    fn non_latin_input_names_offender() {
        let proj = table(&[&[0, 1], &[0, 1]]);
        assert_eq!(from_latin_square(&proj), Err(AlgebraError::ColumnNotPermutation(0)));
        let rows = table(&[&[0, 1], &[1, 1]]);
        assert_eq!(from_latin_square(&rows), Err(AlgebraError::RowNotPermutation(1)));
    }

    #[test]
    fn quasigroup_multiplication_is_latin() {
        assert_eq!(mul_of_quasigroup_is_latin(&FiniteAlgebra::trivial()), Ok(true));
        let z3 = from_latin_square(&BinaryTable::from_fn(3, |a, b| (2 * a + b + 1) % 3)).unwrap();
        assert_eq!(mul_of_quasigroup_is_latin(&z3), Ok(true));
    }

    #[test]
    fn precondition_failure_is_reported() {
        // mul(x,y)=y, ldiv(x,y)=y, rdiv(y,x)=y satisfies A and B but not C.
        let alg = FiniteAlgebra::from_fns(2, |_, y| y, |_, y| y, |y, _| y);
        match mul_of_quasigroup_is_latin(&alg) {
            Err(AlgebraError::IdentityFails { tag: Tag::C, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_schema_round_trip() {
        let alg = from_latin_square(&table(&[&[0, 1], &[1, 0]])).unwrap();
        let text = alg.to_json();
        assert_eq!(text, r#"{"n":2,"mul":[[0,1],[1,0]],"ldiv":[[0,1],[1,0]],"rdiv":[[0,1],[1,0]]}"#);
        let back: FiniteAlgebra = serde_json::from_str(&text).unwrap();
        assert_eq!(back, alg);
    }

    #[test]
    fn json_rejects_malformed_tables() {
        let bad = r#"{"n":2,"mul":[[0,2],[1,0]],"ldiv":[[0,1],[1,0]],"rdiv":[[0,1],[1,0]]}"#;
        assert!(serde_json::from_str::<FiniteAlgebra>(bad).unwrap_err().to_string().contains("outside"));
        let short = r#"{"n":2,"mul":[[0,1]],"ldiv":[[0,1],[1,0]],"rdiv":[[0,1],[1,0]]}"#;
        assert!(serde_json::from_str::<FiniteAlgebra>(short).is_err());
        let empty = r#"{"n":0,"mul":[],"ldiv":[],"rdiv":[]}"#;
        assert!(serde_json::from_str::<FiniteAlgebra>(empty).is_err());
    }

    #[test]
    fn conjugation_rejects_non_permutations() {
        let alg = FiniteAlgebra::from_fns(2, |a, b| a ^ b, |a, b| a ^ b, |a, b| a ^ b);
        assert!(alg.conjugate(&[0, 0]).is_err());
        assert!(alg.conjugate(&[1, 0]).is_ok());
    }
}
