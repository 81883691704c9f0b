//! Pauli strings and weighted Pauli sums.
//!
//! A string is stored as a pair of bitmasks `(x, z)`. Qubit `q` of an
//! `n`-qubit register lives at bit `n - 1 - q`, so qubit 0 is both the
//! leftmost letter of the text form and the most significant bit of a
//! computational basis index. Per qubit, `(1, 0)` is X, `(0, 1)` is Z and
//! `(1, 1)` is Y; the operator is the literal Pauli letter (not `XZ`), and any
//! phase produced by multiplication is folded into the coefficient.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients below this magnitude are dropped when a sum is simplified.
pub const DEFAULT_DROP_TOL: f64 = 1e-12;

/// Largest Hamiltonian power [`power`] computes unless configured otherwise.
pub const DEFAULT_MAX_POWER: u32 = 12;

/// Widest register a bitmask string can describe.
pub const MAX_QUBITS: usize = 64;

const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

/// Phase-free Pauli string. Ordering is lexicographic on `(x, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliString {
    x: u64,
    z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn from_masks(x: u64, z: u64) -> Self {
        PauliString { x, z }
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Parse a letter string; its length fixes the register width.
    pub fn from_letters(letters: &str) -> Option<Self> {
        let n = letters.chars().count();
        if n == 0 || n > MAX_QUBITS {
            return None;
        }
        let mut s = PauliString::default();
        for (q, c) in letters.chars().enumerate() {
            s = s.with(q, n, Pauli::from_char(c)?);
        }
        Some(s)
    }

    /// Single-qubit operator `p` on qubit `q`, identity elsewhere.
    pub fn single(q: usize, n_qubits: usize, p: Pauli) -> Self {
        PauliString::default().with(q, n_qubits, p)
    }

    /// Copy with qubit `q` set to `p`.
    pub fn with(self, q: usize, n_qubits: usize, p: Pauli) -> Self {
        let bit = 1u64 << (n_qubits - 1 - q);
        let (xb, zb) = p.bits();
        let mut out = self;
        out.x = if xb { out.x | bit } else { out.x & !bit };
        out.z = if zb { out.z | bit } else { out.z & !bit };
        out
    }

    pub fn letter(&self, q: usize, n_qubits: usize) -> Pauli {
        let bit = 1u64 << (n_qubits - 1 - q);
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letters(&self, n_qubits: usize) -> String {
        (0..n_qubits)
            .map(|q| self.letter(q, n_qubits).as_char())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Bits of the qubits carrying a non-identity letter.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    /// Every qubit where both strings act non-trivially carries the same letter.
    pub fn qubit_wise_commutes(&self, other: &PauliString) -> bool {
        let common = self.support() & other.support();
        ((self.x ^ other.x) | (self.z ^ other.z)) & common == 0
    }

    /// Product `self · other` as `(phase, string)` with the phase in {±1, ±i}.
    pub fn multiply(&self, other: &PauliString) -> (Complex64, PauliString) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // P = i^{|x&z|} X^x Z^z, and Z^z1 X^x2 = (-1)^{|z1&x2|} X^x2 Z^z1.
        let exp = (self.x & self.z).count_ones()
            + (other.x & other.z).count_ones()
            + 2 * (self.z & other.x).count_ones()
            + 3 * (x & z).count_ones();
        (I_POW[(exp % 4) as usize], PauliString { x, z })
    }

    /// Image of the basis state `b`: `P|b> = phase |b'>`.
    #[inline]
    pub fn apply_to_basis(&self, b: usize) -> (usize, Complex64) {
        let b64 = b as u64;
        let exp = (self.x & self.z).count_ones() + 2 * (b64 & self.z).count_ones();
        ((b64 ^ self.x) as usize, I_POW[(exp % 4) as usize])
    }
}

/// A single weighted Pauli string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    n_qubits: usize,
    string: PauliString,
    coeff: Complex64,
}

impl PauliTerm {
    pub fn new(n_qubits: usize, string: PauliString, coeff: Complex64) -> Self {
        PauliTerm {
            n_qubits,
            string,
            coeff,
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliTerm::new(n_qubits, PauliString::IDENTITY, Complex64::new(1.0, 0.0))
    }

    pub fn from_letters(letters: &str, coeff: impl Into<Complex64>) -> Result<Self> {
        let string = PauliString::from_letters(letters)
            .ok_or_else(|| Error::InvalidArgument(format!("'{letters}' is not a Pauli string")))?;
        Ok(PauliTerm::new(
            letters.chars().count(),
            string,
            coeff.into(),
        ))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn string(&self) -> PauliString {
        self.string
    }

    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }

    pub fn letters(&self) -> String {
        self.string.letters(self.n_qubits)
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})·{}", self.coeff, self.letters())
    }
}

/// Exact product of two terms.
pub fn multiply(a: &PauliTerm, b: &PauliTerm) -> Result<PauliTerm> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::QubitMismatch {
            left: a.n_qubits,
            right: b.n_qubits,
        });
    }
    let (phase, string) = a.string.multiply(&b.string);
    Ok(PauliTerm::new(
        a.n_qubits,
        string,
        a.coeff * b.coeff * phase,
    ))
}

/// Weighted sum of Pauli strings with one coefficient per distinct string.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let mut s = PauliSum::new(n_qubits);
        s.terms
            .insert(PauliString::IDENTITY, Complex64::new(1.0, 0.0));
        s
    }

    /// Build from `(coefficient, letters)` pairs, summing duplicates.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a str)>,
    {
        let mut sum: Option<PauliSum> = None;
        for (c, letters) in pairs {
            let term = PauliTerm::from_letters(letters, c)?;
            sum.get_or_insert_with(|| PauliSum::new(term.n_qubits))
                .add_term(term)?;
        }
        sum.ok_or_else(|| Error::InvalidArgument("empty Pauli sum".into()))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    /// Terms in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms
            .iter()
            .map(move |(s, c)| PauliTerm::new(self.n_qubits, *s, *c))
    }

    pub fn strings(&self) -> impl Iterator<Item = &PauliString> + '_ {
        self.terms.keys()
    }

    /// Accumulate a term; like strings are combined.
    pub fn add_term(&mut self, term: PauliTerm) -> Result<()> {
        if term.n_qubits != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: term.n_qubits,
            });
        }
        *self.terms.entry(term.string).or_default() += term.coeff;
        Ok(())
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        let mut out = self.clone();
        for t in other.iter() {
            out.add_term(t)?;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(s, c)| (*s, c * factor)).collect(),
        }
    }

    /// Drop coefficients with magnitude below `drop_tol`.
    pub fn simplified(&self, drop_tol: f64) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() >= drop_tol)
                .map(|(s, c)| (*s, *c))
                .collect(),
        }
    }

    /// Product of two sums, combined and simplified with `drop_tol`.
    pub fn mul(&self, other: &PauliSum, drop_tol: f64) -> Result<PauliSum> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for (sa, ca) in &self.terms {
            for (sb, cb) in &other.terms {
                let (phase, s) = sa.multiply(sb);
                *acc.entry(s).or_default() += ca * cb * phase;
            }
        }
        Ok(PauliSum {
            n_qubits: self.n_qubits,
            terms: acc,
        }
        .simplified(drop_tol))
    }

    /// Largest imaginary part over all coefficients.
    pub fn max_imaginary(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_imaginary() < tol
    }

    /// Dense `2^n × 2^n` matrix. Only sensible for small registers.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (s, c) in &self.terms {
            for b in 0..dim {
                let (row, phase) = s.apply_to_basis(b);
                m[(row, b)] += c * phase;
            }
        }
        m
    }

    /// Parse the one-term-per-line text format: `<real coeff> <letters>`.
    /// `#` starts a comment; blank lines are ignored; duplicates are summed.
    pub fn from_text(text: &str) -> Result<PauliSum> {
        let mut sum: Option<PauliSum> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let mut fields = line.split_whitespace();
            let (coeff_tok, letters) = match (fields.next(), fields.next(), fields.next()) {
                (Some(c), Some(l), None) => (c, l),
                _ => {
                    return Err(parse_err(
                        "expected '<coefficient> <Pauli letters>'".to_string(),
                    ))
                }
            };
            let coeff = parse_real(coeff_tok).map_err(parse_err)?;
            let string = PauliString::from_letters(letters).ok_or_else(|| {
                parse_err(format!("'{letters}' is not a string over {{I,X,Y,Z}}"))
            })?;
            let n = letters.chars().count();
            let acc = sum.get_or_insert_with(|| PauliSum::new(n));
            if acc.n_qubits != n {
                return Err(parse_err(format!(
                    "string length {n} differs from the first term's {}",
                    acc.n_qubits
                )));
            }
            acc.add_term(PauliTerm::new(n, string, Complex64::new(coeff, 0.0)))?;
        }
        let sum = sum.ok_or(Error::Parse {
            line: 0,
            message: "no terms found".to_string(),
        })?;
        Ok(sum.simplified(DEFAULT_DROP_TOL))
    }

    /// Canonical text form with 17 significant digits. Imaginary parts are
    /// not representable and are dropped.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, c) in &self.terms {
            out.push_str(&format!("{:.16e} {}\n", c.re, s.letters(self.n_qubits)));
        }
        out
    }
}

fn parse_real(tok: &str) -> std::result::Result<f64, String> {
    // Accept the typographic minus sign as well.
    let normalized = tok.replace('\u{2212}', "-");
    if normalized.ends_with('i') || normalized.ends_with('j') {
        return Err(format!("coefficient '{tok}' is not real"));
    }
    normalized
        .parse::<f64>()
        .map_err(|_| format!("cannot parse coefficient '{tok}'"))
}

/// Combine like strings of a raw term list and drop small coefficients.
pub fn simplify<I>(n_qubits: usize, terms: I, drop_tol: f64) -> Result<PauliSum>
where
    I: IntoIterator<Item = PauliTerm>,
{
    let mut sum = PauliSum::new(n_qubits);
    for t in terms {
        sum.add_term(t)?;
    }
    Ok(sum.simplified(drop_tol))
}

/// `h^n` with the default limit and drop tolerance.
pub fn power(h: &PauliSum, n: u32) -> Result<PauliSum> {
    power_with(h, n, DEFAULT_MAX_POWER, DEFAULT_DROP_TOL)
}

pub fn power_with(h: &PauliSum, n: u32, max_power: u32, drop_tol: f64) -> Result<PauliSum> {
    Ok(powers_with(h, n, max_power, drop_tol)?
        .pop()
        .expect("powers_with returns n + 1 sums"))
}

/// `[h^0, h^1, …, h^max_order]`, each simplified after its multiplication.
pub fn powers_with(
    h: &PauliSum,
    max_order: u32,
    max_power: u32,
    drop_tol: f64,
) -> Result<Vec<PauliSum>> {
    if max_order > max_power {
        return Err(Error::PowerLimit {
            requested: max_order,
            limit: max_power,
        });
    }
    let h = h.simplified(drop_tol);
    let mut out = Vec::with_capacity(max_order as usize + 1);
    out.push(PauliSum::identity(h.n_qubits));
    for n in 1..=max_order as usize {
        let next = out[n - 1].mul(&h, drop_tol)?;
        out.push(next);
    }
    Ok(out)
}

/// Every string appearing in any of `sums`, weighted by its largest
/// coefficient magnitude. Used to group the strings shared by several moments.
pub fn string_union(sums: &[PauliSum]) -> Result<PauliSum> {
    let n_qubits = match sums.first() {
        Some(s) => s.n_qubits,
        None => return Err(Error::InvalidArgument("no sums to merge".into())),
    };
    let mut terms: BTreeMap<PauliString, Complex64> = BTreeMap::new();
    for s in sums {
        if s.n_qubits != n_qubits {
            return Err(Error::QubitMismatch {
                left: n_qubits,
                right: s.n_qubits,
            });
        }
        for (k, c) in &s.terms {
            let e = terms.entry(*k).or_default();
            if c.norm() > e.re {
                *e = Complex64::new(c.norm(), 0.0);
            }
        }
    }
    Ok(PauliSum { n_qubits, terms })
}

/// Greedy first-fit qubit-wise-commuting partition. Terms are visited by
/// descending coefficient magnitude (ties in canonical order).
pub fn qwc_groups(s: &PauliSum) -> Vec<Vec<PauliTerm>> {
    let mut order: Vec<PauliTerm> = s.iter().collect();
    order.sort_by(|a, b| b.coeff.norm().total_cmp(&a.coeff.norm()));

    // Each group keeps the union of its letters as one shared basis string.
    let mut bases: Vec<PauliString> = Vec::new();
    let mut groups: Vec<Vec<PauliTerm>> = Vec::new();
    for term in order {
        let s = term.string;
        match bases.iter().position(|b| b.qubit_wise_commutes(&s)) {
            Some(g) => {
                bases[g] = PauliString::from_masks(bases[g].x | s.x, bases[g].z | s.z);
                groups[g].push(term);
            }
            None => {
                bases.push(s);
                groups.push(vec![term]);
            }
        }
    }
    groups
}

/// Shared measurement basis of a QWC group: per qubit, the letter any
/// member carries there.
pub fn group_basis(group: &[PauliTerm]) -> PauliString {
    group.iter().fold(PauliString::IDENTITY, |acc, t| {
        PauliString::from_masks(acc.x | t.string.x, acc.z | t.string.z)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn term(letters: &str) -> PauliTerm {
        PauliTerm::from_letters(letters, 1.0).unwrap()
    }

    #[test]
    fn single_qubit_products() {
        let p = multiply(&term("X"), &term("Y")).unwrap();
        assert_eq!(p.letters(), "Z");
        assert_eq!(p.coeff(), c(0.0, 1.0));

        let p = multiply(&term("Y"), &term("X")).unwrap();
        assert_eq!(p.coeff(), c(0.0, -1.0));

        let p = multiply(&term("Z"), &term("X")).unwrap();
        assert_eq!((p.letters().as_str(), p.coeff()), ("Y", c(0.0, 1.0)));

        let p = multiply(&term("Y"), &term("Y")).unwrap();
        assert_eq!((p.letters().as_str(), p.coeff()), ("I", c(1.0, 0.0)));
    }

    #[test]
    fn two_qubit_product_phase() {
        let p = multiply(&term("XX"), &term("ZZ")).unwrap();
        assert_eq!(p.letters(), "YY");
        assert_eq!(p.coeff(), c(-1.0, 0.0));
    }

    #[test]
    fn identity_is_neutral() {
        for letters in ["XY", "ZI", "YY", "IZ"] {
            let p = multiply(&term("II"), &term(letters)).unwrap();
            assert_eq!(p.letters(), letters);
            assert_eq!(p.coeff(), c(1.0, 0.0));
        }
    }

    #[test]
    fn qubit_mismatch_is_rejected() {
        assert!(matches!(
            multiply(&term("X"), &term("XX")),
            Err(Error::QubitMismatch { .. })
        ));
    }

    #[test]
    fn simplify_combines_and_drops() {
        let s = simplify(
            2,
            [
                PauliTerm::from_letters("ZZ", 0.5).unwrap(),
                PauliTerm::from_letters("ZZ", 0.5).unwrap(),
            ],
            DEFAULT_DROP_TOL,
        )
        .unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.iter().next().unwrap().coeff(), c(1.0, 0.0));

        let s = simplify(
            1,
            [
                PauliTerm::from_letters("X", 1.0).unwrap(),
                PauliTerm::from_letters("X", -1.0).unwrap(),
            ],
            DEFAULT_DROP_TOL,
        )
        .unwrap();
        assert!(s.is_empty());
    }

    fn h_b() -> PauliSum {
        PauliSum::from_pairs([(1.0, "II"), (0.5, "IZ"), (-0.5, "ZZ")]).unwrap()
    }

    #[test]
    fn square_of_toy_b() {
        // (I + ½ IZ − ½ ZZ)² expanded by hand.
        let sq = power(&h_b(), 2).unwrap();
        let expected =
            PauliSum::from_pairs([(1.5, "II"), (1.0, "IZ"), (-1.0, "ZZ"), (-0.5, "ZI")]).unwrap();
        assert_eq!(sq.len(), 4);
        for t in expected.iter() {
            assert!((sq.coefficient(&t.string()) - t.coeff()).norm() < 1e-14);
        }
    }

    #[test]
    fn zeroth_power_is_identity() {
        let p = power(&h_b(), 0).unwrap();
        assert_eq!(p, PauliSum::identity(2));
    }

    #[test]
    fn z_squared_is_identity() {
        let z = PauliSum::from_pairs([(1.0, "Z")]).unwrap();
        assert_eq!(power(&z, 2).unwrap(), PauliSum::identity(1));
    }

    #[test]
    fn power_limit_is_enforced() {
        assert!(matches!(
            power(&h_b(), DEFAULT_MAX_POWER + 1),
            Err(Error::PowerLimit { .. })
        ));
    }

    #[test]
    fn qwc_examples() {
        let s = PauliSum::from_pairs([(1.0, "ZI"), (0.5, "IZ"), (0.3, "ZZ")]).unwrap();
        assert_eq!(qwc_groups(&s).len(), 1);
        let s = PauliSum::from_pairs([(1.0, "XX"), (0.5, "ZI")]).unwrap();
        assert_eq!(qwc_groups(&s).len(), 2);
    }

    #[test]
    fn qwc_groups_are_ordered_by_magnitude() {
        let s = PauliSum::from_pairs([(0.1, "XI"), (0.9, "ZI"), (0.5, "IZ")]).unwrap();
        let groups = qwc_groups(&s);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0][0].letters(), "ZI");
        assert_eq!(groups[0][1].letters(), "IZ");
        assert_eq!(groups[1][0].letters(), "XI");
        assert_eq!(group_basis(&groups[0]).letters(2), "ZZ");
    }

    #[test]
    fn text_format() {
        let s = PauliSum::from_text("1.0 ZI\n1.0 ZI\n").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.iter().next().unwrap().coeff(), c(2.0, 0.0));

        let s = PauliSum::from_text("0.5 XY\n# comment\n\u{2212}0.5 YX\n").unwrap();
        assert_eq!((s.len(), s.n_qubits()), (2, 2));

        let s = PauliSum::from_text("  0.25 XZ   # trailing\n\n-1e-1 IY").unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn text_format_errors_carry_line_numbers() {
        let err = PauliSum::from_text("1.0 ZI\n1.0 Z\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = PauliSum::from_text("# header\nabc ZI\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = PauliSum::from_text("1.0 ZQ\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = PauliSum::from_text("1.0i ZZ\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(PauliSum::from_text("# nothing\n").is_err());
    }

    #[test]
    fn toy_a_dense_is_diagonal() {
        let h = PauliSum::from_pairs([(1.5, "II"), (0.5, "IZ"), (-1.0, "ZZ")]).unwrap();
        let m = h.to_dense();
        let expected = [1.0, 2.0, 3.0, 0.0];
        for r in 0..4 {
            for col in 0..4 {
                let want = if r == col { expected[r] } else { 0.0 };
                assert_eq!(m[(r, col)], c(want, 0.0));
            }
        }
    }
}
