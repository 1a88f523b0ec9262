//! Abelianization of presentations via integer Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::presentations::{FilledPresentation, Presentation};
use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v.into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = &self[(i, k)];
                if x.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = x * &other[(k, j)];
                    out[(i, j)] += v;
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                m.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
            }
            prev = m[(k, k)].clone();
        }
        sign * &m[(n - 1, n - 1)]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        for j in 0..self.cols {
            let v = c * &self[(src, j)];
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        for i in 0..self.rows {
            let v = c * &self[(i, src)];
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// `row_witness * input * col_witness = diagonal`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub diagonal: IntMatrix,
    pub row_witness: IntMatrix,
    pub col_witness: IntMatrix,
}

impl SmithForm {
    pub fn factors(&self) -> Vec<BigInt> {
        let n = self.diagonal.rows.min(self.diagonal.cols);
        (0..n)
            .map(|i| self.diagonal[(i, i)].clone())
            .filter(|d| !d.is_zero())
            .collect()
    }

    pub fn invariants(&self) -> AbelianInvariants {
        let f = self.factors();
        AbelianInvariants {
            free_rank: self.diagonal.cols - f.len(),
            torsion: f.into_iter().filter(|d| !d.is_one()).collect(),
        }
    }

    /// Checks `P A Q = D`, the divisibility chain, and `det P, det Q = ±1`.
    pub fn verify(&self, input: &IntMatrix) -> bool {
        let prod = self.row_witness.mul(input).mul(&self.col_witness);
        if prod != self.diagonal || !self.diagonal.is_diagonal() {
            return false;
        }
        let f = self.factors();
        if f.iter().any(|d| d.is_negative()) || f.windows(2).any(|w| !(&w[1] % &w[0]).is_zero()) {
            return false;
        }
        let n = self.diagonal.rows.min(self.diagonal.cols);
        if (f.len()..n).any(|i| !self.diagonal[(i, i)].is_zero()) {
            return false;
        }
        let unit = |m: &IntMatrix| m.determinant().abs().is_one();
        unit(&self.row_witness) && unit(&self.col_witness)
    }
}

pub fn smith_normal_form(input: &IntMatrix) -> SmithForm {
    let (rows, cols) = (input.rows, input.cols);
    let mut a = input.clone();
    let mut p = IntMatrix::identity(rows);
    let mut q = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            // pivot: smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[(i, j)].is_zero()
                        && best.is_none_or(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(a, p, q);
            };
            a.swap_rows(t, pi);
            p.swap_rows(t, pi);
            a.swap_cols(t, pj);
            q.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                let c = a[(i, t)].div_floor(&a[(t, t)]);
                if !c.is_zero() {
                    let neg = -&c;
                    a.add_row(i, t, &neg);
                    p.add_row(i, t, &neg);
                }
                if !a[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let c = a[(t, j)].div_floor(&a[(t, t)]);
                if !c.is_zero() {
                    let neg = -&c;
                    a.add_col(j, t, &neg);
                    q.add_col(j, t, &neg);
                }
                if !a[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let mut offending = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[(i, j)] % &a[(t, t)]).is_zero() {
                        offending = Some(i);
                        break 'scan;
                    }
                }
            }
            match offending {
                Some(i) => {
                    let one = BigInt::one();
                    a.add_row(t, i, &one);
                    p.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            p.negate_row(t);
        }
    }
    finish(a, p, q)
}

fn finish(a: IntMatrix, p: IntMatrix, q: IntMatrix) -> SmithForm {
    SmithForm {
        diagonal: a,
        row_witness: p,
        col_witness: q,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianInvariants {
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianInvariants {
    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.torsion.iter().product())
        }
    }

    pub fn is_infinite_cyclic(&self) -> bool {
        self.free_rank == 1 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

pub fn relator_matrix(pres: &Presentation) -> IntMatrix {
    words_matrix(pres.relators(), pres.rank())
}

pub fn words_matrix(words: &[Word], rank: usize) -> IntMatrix {
    let mut m = IntMatrix::zeros(words.len(), rank);
    for (i, w) in words.iter().enumerate() {
        for (j, e) in w.stats().exponent_sum.into_iter().enumerate() {
            m[(i, j)] = e.into();
        }
    }
    m
}

pub fn abelianize(pres: &Presentation) -> AbelianInvariants {
    smith_normal_form(&relator_matrix(pres)).invariants()
}

/// When `H1(pres) = Z`, the isomorphism onto `Z` as a linear functional on
/// exponent vectors. Row vectors `x` map to `x Q`, which turns the relator
/// lattice into the row space of the diagonal form.
pub fn infinite_cyclic_functional(pres: &Presentation) -> Option<Vec<BigInt>> {
    let snf = smith_normal_form(&relator_matrix(pres));
    let inv = snf.invariants();
    if !inv.is_infinite_cyclic() {
        return None;
    }
    let free_index = snf.factors().len();
    Some(
        (0..pres.rank())
            .map(|j| snf.col_witness[(j, free_index)].clone())
            .collect(),
    )
}

fn apply(functional: &[BigInt], w: &Word) -> BigInt {
    w.stats()
        .exponent_sum
        .iter()
        .zip(functional)
        .map(|(&e, f)| BigInt::from(e) * f)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct H1Report {
    pub computed_h1: String,
    pub computed_order: Option<String>,
    pub expected_h1: String,
    pub expected_note: String,
    #[serde(rename = "match")]
    pub matches: bool,
    pub meridian_generates: bool,
    /// Class of the longitude as a multiple of the meridian class in the
    /// abelianized knot group; absent when that group is not `Z`.
    pub longitude_class: Option<i64>,
}

pub const EXPECTED_NOTE: &str =
    "expected if peripheral data is a true meridian/preferred-longitude pair";

pub fn h1_diagnostic(filled: &FilledPresentation) -> H1Report {
    let rank = filled.base.rank();
    let snf = smith_normal_form(&words_matrix(&filled.relators, rank));
    let inv = snf.invariants();
    let p = filled.slope.p;
    let expected = if p == 0 {
        AbelianInvariants {
            torsion: vec![],
            free_rank: 1,
        }
    } else {
        AbelianInvariants {
            torsion: if p.abs() == 1 {
                vec![]
            } else {
                vec![BigInt::from(p.abs())]
            },
            free_rank: 0,
        }
    };
    let matches = if p == 0 {
        inv.is_infinite_cyclic()
    } else {
        inv.order() == Some(BigInt::from(p.abs()))
    };

    let mut meridian_generates = false;
    let mut longitude_class = None;
    if let Some(phi) = infinite_cyclic_functional(&filled.base) {
        let m = apply(&phi, &filled.peripheral.meridian);
        if m.abs().is_one() {
            meridian_generates = true;
            let l = apply(&phi, &filled.peripheral.longitude) * &m;
            longitude_class = l.to_i64();
        }
    }
    H1Report {
        computed_h1: inv.to_string(),
        computed_order: inv.order().map(|o| o.to_string()),
        expected_h1: expected.to_string(),
        expected_note: EXPECTED_NOTE.to_string(),
        matches,
        meridian_generates,
        longitude_class,
    }
}

impl H1Report {
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("computed H1: {}\n", self.computed_h1));
        s.push_str(&format!(
            "expected H1: {} ({})\n",
            self.expected_h1, self.expected_note
        ));
        s.push_str(&format!("match: {}\n", self.matches));
        s.push_str(&format!(
            "meridian generates H1(knot group): {}\n",
            self.meridian_generates
        ));
        match self.longitude_class {
            Some(c) => s.push_str(&format!("longitude class: {c} x meridian\n")),
            None => s.push_str("longitude class: n/a\n"),
        }
        s
    }
}
