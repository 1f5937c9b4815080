use std::fmt;
use std::sync::Arc;

use super::poly::{same_ring, ModPoly, Ring};
use crate::error::{Error, Result};

/// Rectangular matrix of polynomials, row-major.
#[derive(Clone, Debug)]
pub struct PolyMatrix {
    ring: Arc<Ring>,
    rows: usize,
    cols: usize,
    entries: Vec<ModPoly>,
}

impl PartialEq for PolyMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }
}

impl Eq for PolyMatrix {}

impl PolyMatrix {
    pub fn zero(ring: &Arc<Ring>, rows: usize, cols: usize) -> Self {
        PolyMatrix { ring: ring.clone(), rows, cols, entries: vec![ModPoly::zero(ring); rows * cols] }
    }

    pub fn identity(ring: &Arc<Ring>, d: usize) -> Self {
        Self::scalar(ring, d, &ModPoly::one(ring))
    }

    /// `f` times the d x d identity.
    pub fn scalar(ring: &Arc<Ring>, d: usize, f: &ModPoly) -> Self {
        let mut m = Self::zero(ring, d, d);
        for i in 0..d {
            m.set(i, i, f.clone());
        }
        m
    }

    /// The elementary matrix E_{ij} (zero-based) in dimension d.
    pub fn unit(ring: &Arc<Ring>, d: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(ring, d, d);
        m.set(i, j, ModPoly::one(ring));
        m
    }

    pub fn from_fn(ring: &Arc<Ring>, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ModPoly) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        PolyMatrix { ring: ring.clone(), rows, cols, entries }
    }

    pub fn from_rows(ring: &Arc<Ring>, rows: Vec<Vec<ModPoly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(PolyMatrix { ring: ring.clone(), rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    /// Column vector from entries.
    pub fn column(ring: &Arc<Ring>, entries: Vec<ModPoly>) -> Self {
        PolyMatrix { ring: ring.clone(), rows: entries.len(), cols: 1, entries }
    }

    pub fn parse(ring: &Arc<Ring>, src: &str) -> Result<Self> {
        let s = src.trim();
        let inner = s
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Parse { column: 1, message: "matrix must be [[...], ...]".into() })?;
        let mut rows = Vec::new();
        let mut depth = 0;
        let mut start = None;
        let offset = src.find('[').unwrap_or(0) + 1;
        for (k, ch) in inner.char_indices() {
            match ch {
                '[' => {
                    if depth == 0 {
                        start = Some(k + 1);
                    }
                    depth += 1;
                }
                ']' => {
                    depth -= 1;
                    if depth == 0 {
                        let st = start.take().unwrap();
                        let mut row = Vec::new();
                        let mut col_start = st;
                        for piece in inner[st..k].split(',') {
                            let f = ModPoly::parse(ring, piece).map_err(|e| match e {
                                Error::Parse { column, message } => {
                                    Error::Parse { column: column + offset + col_start, message }
                                }
                                other => other,
                            })?;
                            row.push(f);
                            col_start += piece.len() + 1;
                        }
                        rows.push(row);
                    }
                }
                ',' | ' ' | '\t' if depth == 0 => {}
                _ if depth == 0 => {
                    return Err(Error::Parse { column: offset + k + 1, message: format!("unexpected `{ch}`") })
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(Error::Parse { column: src.len(), message: "unbalanced brackets".into() });
        }
        Self::from_rows(ring, rows)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &ModPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: ModPoly) {
        self.entries[i * self.cols + j] = f;
    }

    pub fn entries(&self) -> &[ModPoly] {
        &self.entries
    }

    pub fn col(&self, j: usize) -> PolyMatrix {
        PolyMatrix::column(&self.ring, (0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn from_columns(ring: &Arc<Ring>, cols: &[PolyMatrix]) -> Result<Self> {
        let rows = cols.first().map_or(0, |c| c.rows);
        if cols.iter().any(|c| c.cols != 1 || c.rows != rows) {
            return Err(Error::Dimension("columns must be equal-length vectors".into()));
        }
        Ok(PolyMatrix::from_fn(ring, rows, cols.len(), |i, j| cols[j].get(i, 0).clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ModPoly::is_zero)
    }

    pub fn map(&self, f: impl FnMut(&ModPoly) -> ModPoly) -> PolyMatrix {
        let entries: Vec<ModPoly> = self.entries.iter().map(f).collect();
        let ring = entries.first().map_or_else(|| self.ring.clone(), |e| e.ring().clone());
        PolyMatrix { ring, rows: self.rows, cols: self.cols, entries }
    }

    fn same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::RingMismatch(what.into()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "add")?;
        Ok(PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::RingMismatch("multiply".into()));
        }
        let mut out = PolyMatrix::zero(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.entries[idx] = out.entries[idx].add(&a.mul(b));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("matrix add")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.try_sub(other).expect("matrix sub")
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("matrix multiply")
    }

    pub fn neg(&self) -> Self {
        self.map(ModPoly::neg)
    }

    pub fn scale(&self, c: u64) -> Self {
        self.map(|f| f.scale(c))
    }

    pub fn mul_poly(&self, f: &ModPoly) -> Self {
        self.map(|g| f.mul(g))
    }

    pub fn derive(&self, i: usize) -> Self {
        self.map(|f| f.derive(i))
    }

    pub fn transpose(&self) -> Self {
        PolyMatrix::from_fn(&self.ring, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    pub fn pow(&self, e: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("power of a non-square matrix".into()));
        }
        let mut acc = PolyMatrix::identity(&self.ring, self.rows);
        for _ in 0..e {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }

    /// Determinant by cofactor expansion (ranks here are tiny).
    pub fn det(&self) -> Result<ModPoly> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        Ok(self.det_rec(&(0..self.rows).collect::<Vec<_>>(), &(0..self.cols).collect::<Vec<_>>()))
    }

    fn det_rec(&self, rows: &[usize], cols: &[usize]) -> ModPoly {
        match rows.len() {
            0 => ModPoly::one(&self.ring),
            1 => self.get(rows[0], cols[0]).clone(),
            _ => {
                let mut acc = ModPoly::zero(&self.ring);
                for (k, &c) in cols.iter().enumerate() {
                    let a = self.get(rows[0], c);
                    if a.is_zero() {
                        continue;
                    }
                    let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let minor = a.mul(&self.det_rec(&rows[1..], &sub_cols));
                    acc = if k % 2 == 0 { acc.add(&minor) } else { acc.sub(&minor) };
                }
                acc
            }
        }
    }

    /// adj(A), with A · adj(A) = det(A) · I.
    pub fn adjugate(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("adjugate of a non-square matrix".into()));
        }
        let n = self.rows;
        let idx: Vec<usize> = (0..n).collect();
        Ok(PolyMatrix::from_fn(&self.ring, n, n, |i, j| {
            // adj(A)_{ij} = (-1)^{i+j} M_{ji}
            let rows: Vec<usize> = idx.iter().copied().filter(|&r| r != j).collect();
            let cols: Vec<usize> = idx.iter().copied().filter(|&c| c != i).collect();
            let minor = self.det_rec(&rows, &cols);
            if (i + j) % 2 == 0 {
                minor
            } else {
                minor.neg()
            }
        }))
    }

    /// Inverse over the polynomial ring; requires a nonzero constant determinant.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det()?;
        let c = match det.constant_value() {
            Some(c) if c != 0 => c,
            _ => return Err(Error::NotInvertible(det.to_string())),
        };
        let inv_c = self.ring.prime().inv(c).unwrap();
        Ok(self.adjugate()?.scale(inv_c))
    }

    pub fn substitute(&self, target: &Arc<Ring>, images: &[ModPoly]) -> Self {
        let mut m = self.map(|f| f.substitute(target, images));
        m.ring = target.clone();
        m
    }

    pub fn to_ring(&self, target: &Arc<Ring>) -> Result<Self> {
        let entries = self.entries.iter().map(|f| f.to_ring(target)).collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix { ring: target.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn specialize(&self, var: usize, value: u64) -> Self {
        self.map(|f| f.specialize(var, value))
    }

    /// Maximum coordinate degree over the entries.
    pub fn coord_degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(ModPoly::coord_degree).max()
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Prime;

    fn ring() -> Arc<Ring> {
        Ring::new(Prime::new(3).unwrap(), &["x"], None)
    }

    #[test]
    fn parse_and_render() {
        let r = ring();
        let m = PolyMatrix::parse(&r, "[[1, x], [0, x^2 + 1]]").unwrap();
        assert_eq!(m.to_string(), "[[1, x], [0, x^2 + 1]]");
        assert!(PolyMatrix::parse(&r, "[[1, x], [0]]").is_err());
        match PolyMatrix::parse(&r, "[[1, q]]") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unipotent_inverse() {
        let r = ring();
        let s = PolyMatrix::parse(&r, "[[1, x], [0, 1]]").unwrap();
        let inv = s.inverse().unwrap();
        assert_eq!(inv.to_string(), "[[1, 2*x], [0, 1]]");
        assert_eq!(s.mul(&inv), PolyMatrix::identity(&r, 2));
        let bad = PolyMatrix::parse(&r, "[[x, 0], [0, 1]]").unwrap();
        assert!(matches!(bad.inverse(), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn dimension_errors() {
        let r = ring();
        let a = PolyMatrix::zero(&r, 2, 3);
        let b = PolyMatrix::zero(&r, 2, 3);
        assert!(matches!(a.try_mul(&b), Err(Error::Dimension(_))));
        assert!(a.try_add(&b).is_ok());
    }
}
