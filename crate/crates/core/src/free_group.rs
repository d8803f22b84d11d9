//! Words, cyclic words, endomorphisms and Whitehead automorphisms of the
//! free group of rank n.
//!
//! Generator `i` is encoded as the integer `i` and its inverse as `-i`.
//! The textual alphabet is `xyzwabcdefghijklmnopqrstuv`, lowercase for a
//! generator and uppercase for its inverse, so rank-2 words read as `xyXY`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Generator names in order; generator `i` is `ALPHABET[i - 1]`.
pub const ALPHABET: &[u8; 26] = b"xyzwabcdefghijklmnopqrstuv";
pub const MAX_RANK: usize = ALPHABET.len();

/// A signed generator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i32);

impl Letter {
    /// `generator` is 1-based.
    pub fn new(generator: usize, inverse: bool) -> Letter {
        assert!(generator >= 1, "generators are 1-based");
        let g = generator as i32;
        Letter(if inverse { -g } else { g })
    }

    pub fn from_code(code: i32) -> Option<Letter> {
        (code != 0).then_some(Letter(code))
    }

    #[inline]
    pub fn code(self) -> i32 {
        self.0
    }

    #[inline]
    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    /// Dense index in `0..2n`: `X, x, Y, y, ...`. This is also the letter
    /// order used for canonical forms and tie-breaks.
    #[inline]
    pub fn index(self) -> usize {
        2 * (self.generator() - 1) + usize::from(!self.is_inverse())
    }

    #[inline]
    pub fn from_index(i: usize) -> Letter {
        Letter::new(i / 2 + 1, i.is_multiple_of(2))
    }

    /// All `2n` signed letters in index order.
    pub fn all(rank: usize) -> impl Iterator<Item = Letter> {
        (0..2 * rank).map(Letter::from_index)
    }

    pub fn to_char(self) -> char {
        let c = ALPHABET[self.generator() - 1] as char;
        if self.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        let lower = c.to_ascii_lowercase();
        let pos = ALPHABET.iter().position(|&b| b as char == lower)?;
        Some(Letter::new(pos + 1, c.is_ascii_uppercase()))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index().cmp(&other.index())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Appends `l` to a freely reduced buffer, cancelling if possible.
#[inline]
pub(crate) fn push_reduced(buf: &mut Vec<Letter>, l: Letter) {
    if buf.last() == Some(&l.inverse()) {
        buf.pop();
    } else {
        buf.push(l);
    }
}

/// A freely reduced word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut buf = Vec::new();
        for l in letters {
            push_reduced(&mut buf, l);
        }
        Word(buf)
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn generator(g: usize) -> Word {
        Word(vec![Letter::new(g, false)])
    }

    /// Parses `xyXY`-style text. Whitespace is ignored; `1` or the empty
    /// string denote the identity.
    pub fn parse(s: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for c in s.chars().filter(|c| !c.is_whitespace()) {
            if c == '1' && s.trim() == "1" {
                continue;
            }
            let l = Letter::from_char(c)
                .ok_or_else(|| Error::Parse(format!("unknown letter '{c}' in word \"{s}\"")))?;
            letters.push(l);
        }
        Ok(Word::from_letters(letters))
    }

    /// Parses and checks every letter against `rank`.
    pub fn parse_with_rank(s: &str, rank: usize) -> Result<Word> {
        let w = Word::parse(s)?;
        w.check_rank(rank)?;
        Ok(w)
    }

    #[inline]
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest generator index occurring, 0 for the identity.
    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|l| l.generator()).max().unwrap_or(0)
    }

    pub fn check_rank(&self, rank: usize) -> Result<()> {
        match self.0.iter().find(|l| l.generator() > rank) {
            Some(l) => Err(Error::LetterOutOfRange { letter: l.code(), rank }),
            None => Ok(()),
        }
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced product `self · other`.
    pub fn mul(&self, other: &Word) -> Word {
        let mut buf = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut buf, l);
        }
        Word(buf)
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(&a), Some(&b)) => self.0.len() == 1 || a != b.inverse(),
            _ => true,
        }
    }

    /// Splits `w = c · core · c⁻¹` with `core` cyclically reduced. Returns the
    /// cyclic class of the core and the conjugator `c`.
    pub fn cyclic_reduce(&self) -> (CyclicWord, Word) {
        let (start, end) = self.cyclic_core_bounds();
        let conj = Word(self.0[..start].to_vec());
        (CyclicWord::from_cyclically_reduced(&self.0[start..end]), conj)
    }

    /// The cyclically reduced core as a plain word (no rotation applied).
    pub fn cyclic_core(&self) -> Word {
        let (start, end) = self.cyclic_core_bounds();
        Word(self.0[start..end].to_vec())
    }

    fn cyclic_core_bounds(&self) -> (usize, usize) {
        let (mut i, mut j) = (0, self.0.len());
        while j - i >= 2 && self.0[i] == self.0[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        (i, j)
    }

    /// Oriented conjugacy: `self` and `other` are conjugate elements.
    pub fn is_conjugate_to(&self, other: &Word) -> bool {
        let a = self.cyclic_core();
        let b = other.cyclic_core();
        a.len() == b.len() && least_rotation(a.letters()) == least_rotation(b.letters())
    }

    /// Reduces raw integer codes, checking every code against `rank`.
    pub fn from_codes(rank: usize, codes: &[i32]) -> Result<Word> {
        let mut letters = Vec::with_capacity(codes.len());
        for &c in codes {
            let l = Letter::from_code(c).ok_or(Error::LetterOutOfRange { letter: c, rank })?;
            if l.generator() > rank {
                return Err(Error::LetterOutOfRange { letter: c, rank });
            }
            letters.push(l);
        }
        Ok(Word::from_letters(letters))
    }

    pub fn codes(&self) -> Vec<i32> {
        self.0.iter().map(|l| l.code()).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Reduces a raw letter sequence given as integer codes.
pub fn reduce_word(rank: usize, codes: &[i32]) -> Result<Word> {
    Word::from_codes(rank, codes)
}

/// Lexicographically least rotation (naive, quadratic).
pub(crate) fn least_rotation(s: &[Letter]) -> Vec<Letter> {
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    let mut best = 0;
    for r in 1..n {
        for k in 0..n {
            let a = s[(r + k) % n];
            let b = s[(best + k) % n];
            if a != b {
                if a < b {
                    best = r;
                }
                break;
            }
        }
    }
    (0..n).map(|k| s[(best + k) % n]).collect()
}

/// A conjugacy class up to inversion, stored as the least rotation of the
/// word or its inverse.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    pub fn new(w: &Word) -> CyclicWord {
        w.cyclic_reduce().0
    }

    pub fn parse(s: &str) -> Result<CyclicWord> {
        Ok(CyclicWord::new(&Word::parse(s)?))
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> CyclicWord {
        CyclicWord::new(&Word::from_letters(letters))
    }

    fn from_cyclically_reduced(core: &[Letter]) -> CyclicWord {
        if core.is_empty() {
            return CyclicWord(Vec::new());
        }
        let fwd = least_rotation(core);
        let inv: Vec<Letter> = core.iter().rev().map(|l| l.inverse()).collect();
        let bwd = least_rotation(&inv);
        CyclicWord(fwd.min(bwd))
    }

    #[inline]
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The canonical representative as a (cyclically reduced) word.
    pub fn as_word(&self) -> Word {
        Word(self.0.clone())
    }

    /// True if the stored letters are already canonical.
    pub fn is_canonical_letters(letters: &[Letter]) -> bool {
        let w = Word(letters.to_vec());
        if Word::from_letters(letters.iter().copied()) != w || !w.is_cyclically_reduced() {
            return false;
        }
        CyclicWord::from_cyclically_reduced(letters).0 == letters
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_word())
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.as_word())
    }
}

/// An endomorphism of F_n given by generator images. Bijectivity is only
/// asserted once an inverse has been attached (`is_verified`).
#[derive(Clone)]
pub struct Automorphism {
    rank: usize,
    images: Vec<Word>,
    inverse: Option<Arc<Vec<Word>>>,
}

impl PartialEq for Automorphism {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.images == other.images
    }
}

impl Eq for Automorphism {}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Automorphism({self}")?;
        if self.is_verified() {
            write!(f, ", verified")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}->{}", Letter::new(i + 1, false), w)?;
        }
        Ok(())
    }
}

impl Automorphism {
    pub fn new(rank: usize, images: Vec<Word>) -> Result<Automorphism> {
        if rank == 0 || rank > MAX_RANK {
            return Err(Error::Parse(format!("unsupported rank {rank}")));
        }
        if images.len() != rank {
            return Err(Error::RankMismatch { expected: rank, found: images.len() });
        }
        for w in &images {
            w.check_rank(rank)?;
        }
        Ok(Automorphism { rank, images, inverse: None })
    }

    /// Builds from `(generator name, image text)` pairs such as `("x", "xy")`.
    pub fn from_named<'a, I>(pairs: I) -> Result<Automorphism>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let pairs: Vec<(&str, &str)> = pairs.into_iter().collect();
        let rank = pairs.len();
        let mut images = vec![None; rank];
        for (name, image) in pairs {
            let mut chars = name.chars();
            let g = match (chars.next().and_then(Letter::from_char), chars.next()) {
                (Some(l), None) if !l.is_inverse() => l.generator(),
                _ => return Err(Error::Parse(format!("bad generator name \"{name}\""))),
            };
            if g > rank {
                return Err(Error::Parse(format!(
                    "generator \"{name}\" exceeds rank {rank} implied by the map"
                )));
            }
            images[g - 1] = Some(Word::parse_with_rank(image, rank)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| Error::Parse(format!("missing image of generator {}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        Automorphism::new(rank, images)
    }

    pub fn identity(rank: usize) -> Automorphism {
        let images = (1..=rank).map(Word::generator).collect::<Vec<_>>();
        Automorphism { rank, inverse: Some(Arc::new(images.clone())), images }
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    /// Image of the 1-based generator `g`.
    pub fn image(&self, g: usize) -> &Word {
        &self.images[g - 1]
    }

    pub fn is_verified(&self) -> bool {
        self.inverse.is_some()
    }

    pub(crate) fn apply_letters(&self, letters: &[Letter]) -> Word {
        let mut buf = Vec::new();
        for &l in letters {
            let img = &self.images[l.generator() - 1];
            if l.is_inverse() {
                for &m in img.letters().iter().rev() {
                    push_reduced(&mut buf, m.inverse());
                }
            } else {
                for &m in img.letters() {
                    push_reduced(&mut buf, m);
                }
            }
        }
        Word(buf)
    }

    /// Reduced image of `w`.
    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.max_generator() > self.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: w.max_generator() });
        }
        Ok(self.apply_letters(w.letters()))
    }

    pub fn apply_cyclic(&self, w: &CyclicWord) -> Result<CyclicWord> {
        Ok(CyclicWord::new(&self.apply(&w.as_word())?))
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: other.rank });
        }
        let images = other.images.iter().map(|w| self.apply_letters(w.letters())).collect();
        let inverse = match (&self.inverse, &other.inverse) {
            (Some(si), Some(oi)) => {
                let si = Automorphism { rank: self.rank, images: si.as_ref().clone(), inverse: None };
                let oi = Automorphism { rank: self.rank, images: oi.as_ref().clone(), inverse: None };
                Some(Arc::new(oi.compose(&si)?.images))
            }
            _ => None,
        };
        Ok(Automorphism { rank: self.rank, images, inverse })
    }

    pub fn inverse(&self) -> Result<Automorphism> {
        let inv = self.inverse.as_ref().ok_or(Error::Unverified)?;
        Ok(Automorphism {
            rank: self.rank,
            images: inv.as_ref().clone(),
            inverse: Some(Arc::new(self.images.clone())),
        })
    }

    /// Attaches `psi` as the inverse after checking both compositions.
    pub fn with_inverse(mut self, psi: &Automorphism) -> Result<Automorphism> {
        if !verify_inverse(&self, psi)? {
            return Err(Error::NotABasis(format!("{psi} is not inverse to {self}")));
        }
        self.inverse = Some(Arc::new(psi.images.clone()));
        Ok(self)
    }

    /// Certifies bijectivity by reducing the image tuple to a signed
    /// permutation of the generators, and records the inverse.
    pub fn certify(self) -> Result<Automorphism> {
        if self.is_verified() {
            return Ok(self);
        }
        let inv = basis_inverse(self.rank, &self.images)?;
        let inv_aut = Automorphism { rank: self.rank, images: inv, inverse: None };
        self.with_inverse(&inv_aut)
    }

    /// `self^k`; negative powers need a verified automorphism.
    pub fn power(&self, k: i64) -> Result<Automorphism> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut out = Automorphism::identity(self.rank);
        if !base.is_verified() {
            out.inverse = None;
        }
        for _ in 0..k.unsigned_abs() {
            out = base.compose(&out)?;
        }
        Ok(out)
    }

    /// True if `self` is conjugation by a single element.
    pub fn is_inner(&self) -> bool {
        // x ↦ c x c⁻¹ for every generator; c is determined by x_1 up to its centralizer.
        let bound = self.images.iter().map(Word::len).max().unwrap_or(0) as i64;
        let candidates = inner_conjugators(&self.images[0], &Word::generator(1), bound);
        candidates.iter().any(|c| {
            (1..=self.rank).all(|g| c.mul(&Word::generator(g)).mul(&c.inverse()) == self.images[g - 1])
        })
    }
}

/// Conjugators `c` with `c·target·c⁻¹ = w`, for `target` a single generator.
fn inner_conjugators(w: &Word, target: &Word, bound: i64) -> Vec<Word> {
    let (core, conj) = (w.cyclic_core(), w.cyclic_reduce().1);
    if core != *target {
        return Vec::new();
    }
    // The centralizer of a generator is generated by it, so c = conj · target^k
    // with |k| bounded by the image lengths.
    (-bound..=bound).map(|k| conj.mul(&target.pow(k))).collect()
}

/// True iff `φ∘ψ` and `ψ∘φ` both fix every generator.
pub fn verify_inverse(phi: &Automorphism, psi: &Automorphism) -> Result<bool> {
    if phi.rank != psi.rank {
        return Err(Error::RankMismatch { expected: phi.rank, found: psi.rank });
    }
    let fixes = |a: &Automorphism, b: &Automorphism| {
        (1..=a.rank).all(|g| a.apply_letters(b.image(g).letters()) == Word::generator(g))
    };
    Ok(fixes(phi, psi) && fixes(psi, phi))
}

/// True iff `φ∘ψ` is inner, i.e. the outer classes are mutually inverse.
pub fn verify_inverse_outer(phi: &Automorphism, psi: &Automorphism) -> Result<bool> {
    if verify_inverse(phi, psi)? {
        return Ok(true);
    }
    Ok(phi.compose(psi)?.is_inner() && psi.compose(phi)?.is_inner())
}

/// The Whitehead automorphism φ_(A,a).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WhiteheadMove {
    multiplier: Letter,
    set: Vec<Letter>,
}

impl WhiteheadMove {
    pub fn new<I: IntoIterator<Item = Letter>>(set: I, multiplier: Letter) -> Result<WhiteheadMove> {
        let set: BTreeSet<Letter> = set.into_iter().collect();
        if !set.contains(&multiplier) {
            return Err(Error::InvalidMove(format!("multiplier {multiplier} is not in A")));
        }
        if set.contains(&multiplier.inverse()) {
            return Err(Error::InvalidMove(format!(
                "A contains both {multiplier} and its inverse"
            )));
        }
        Ok(WhiteheadMove { multiplier, set: set.into_iter().collect() })
    }

    pub fn multiplier(&self) -> Letter {
        self.multiplier
    }

    /// The set A, sorted, including the multiplier.
    pub fn set(&self) -> &[Letter] {
        &self.set
    }

    pub fn contains(&self, l: Letter) -> bool {
        self.set.binary_search(&l).is_ok()
    }

    /// φ_(A,a)⁻¹ = φ_(A∖{a} ∪ {a⁻¹}, a⁻¹).
    pub fn inverse_move(&self) -> WhiteheadMove {
        let a = self.multiplier;
        let set = self.set.iter().copied().filter(|&l| l != a).chain(std::iter::once(a.inverse()));
        WhiteheadMove::new(set, a.inverse()).expect("inverse of a valid move is valid")
    }

    /// Generator images following the four-case rule.
    pub fn images(&self, rank: usize) -> Vec<Word> {
        let a = self.multiplier;
        (1..=rank)
            .map(|g| {
                let x = Letter::new(g, false);
                if g == a.generator() {
                    return Word::letter(x);
                }
                match (self.contains(x), self.contains(x.inverse())) {
                    (true, true) => Word::from_letters([a, x, a.inverse()]),
                    (true, false) => Word::from_letters([x, a.inverse()]),
                    (false, true) => Word::from_letters([a, x]),
                    (false, false) => Word::letter(x),
                }
            })
            .collect()
    }

    pub fn check_rank(&self, rank: usize) -> Result<()> {
        match self.set.iter().find(|l| l.generator() > rank) {
            Some(l) => Err(Error::LetterOutOfRange { letter: l.code(), rank }),
            None => Ok(()),
        }
    }

    /// The move as a verified automorphism.
    pub fn automorphism(&self, rank: usize) -> Result<Automorphism> {
        self.check_rank(rank)?;
        let images = self.images(rank);
        let inverse = self.inverse_move().images(rank);
        Ok(Automorphism { rank, images, inverse: Some(Arc::new(inverse)) })
    }

    /// Every Whitehead move of the given rank, ordered by `(a, A)`.
    pub fn all(rank: usize) -> Vec<WhiteheadMove> {
        let mut out = Vec::new();
        for a in Letter::all(rank) {
            let others: Vec<Letter> =
                Letter::all(rank).filter(|&l| l.generator() != a.generator()).collect();
            for mask in 0u64..(1u64 << others.len()) {
                let set = others
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &l)| l)
                    .chain(std::iter::once(a));
                out.push(WhiteheadMove::new(set, a).expect("constructed valid"));
            }
        }
        out.sort();
        out
    }

    /// True for moves that act trivially on conjugacy classes (A = {a} or
    /// A = everything except a⁻¹).
    pub fn is_trivial_on_classes(&self, rank: usize) -> bool {
        self.set.len() == 1 || self.set.len() == 2 * rank - 1
    }
}

impl Ord for WhiteheadMove {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.multiplier, &self.set).cmp(&(other.multiplier, &other.set))
    }
}

impl PartialOrd for WhiteheadMove {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for WhiteheadMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({{")?;
        for (i, l) in self.set.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}},{})", self.multiplier)
    }
}

impl fmt::Debug for WhiteheadMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WhiteheadMove{self}")
    }
}

/// Reduces the tuple `words` (images of x_1..x_n) by length-decreasing
/// Whitehead automorphisms. Returns the inverse images if the tuple is a
/// basis, else `NotABasis`.
pub(crate) fn basis_inverse(rank: usize, words: &[Word]) -> Result<Vec<Word>> {
    if words.len() != rank {
        return Err(Error::RankMismatch { expected: rank, found: words.len() });
    }
    let moves: Vec<Automorphism> = WhiteheadMove::all(rank)
        .into_iter()
        .filter(|m| m.set().len() > 1)
        .map(|m| m.automorphism(rank))
        .collect::<Result<_>>()?;
    let mut tuple: Vec<Word> = words.to_vec();
    // alpha accumulates the applied moves: alpha(words) = tuple.
    let mut alpha = Automorphism::identity(rank);
    let total = |t: &[Word]| t.iter().map(Word::len).sum::<usize>();
    let mut current = total(&tuple);
    while current > rank {
        let mut best: Option<(usize, usize)> = None;
        for (i, m) in moves.iter().enumerate() {
            let len: usize = tuple.iter().map(|w| m.apply_letters(w.letters()).len()).sum();
            if len < current && best.is_none_or(|(_, b)| len < b) {
                best = Some((i, len));
            }
        }
        let Some((i, len)) = best else { break };
        let m = &moves[i];
        tuple = tuple.iter().map(|w| m.apply_letters(w.letters())).collect();
        alpha = m.compose(&alpha)?;
        current = len;
    }
    if tuple.iter().any(|w| w.len() != 1) {
        return Err(Error::NotABasis(format!(
            "tuple reduces to minimal total length {current} > {rank}"
        )));
    }
    // tuple[i] = ±x_σ(i); inverse(x_j) = pi⁻¹(alpha(x_j)).
    let mut pi_inv = vec![None; rank];
    for (i, w) in tuple.iter().enumerate() {
        let l = w.letters()[0];
        let slot = &mut pi_inv[l.generator() - 1];
        if slot.is_some() {
            return Err(Error::NotABasis("tuple reduces to repeated generators".into()));
        }
        *slot = Some(Word::letter(Letter::new(i + 1, l.is_inverse())));
    }
    let pi_inv = Automorphism {
        rank,
        images: pi_inv.into_iter().map(|w| w.expect("permutation is total")).collect(),
        inverse: None,
    };
    Ok(pi_inv.compose(&alpha)?.images)
}
