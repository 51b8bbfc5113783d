use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{Letter, Word};

/// A non-erasing morphism on `{0, …, k-1}`, stored as one image per letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    images: Vec<Word>,
}

/// Letter-count matrix: entry `(i, j)` is the number of `j` in the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix(pub Vec<Vec<u64>>);

impl IncidenceMatrix {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.0[i]
    }
}

impl fmt::Display for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

impl Morphism {
    pub fn new(images: Vec<Word>) -> Result<Self> {
        let k = images.len();
        if k == 0 {
            return Err(Error::InvalidMorphism("alphabet must have at least one letter".into()));
        }
        if k > u16::MAX as usize {
            return Err(Error::InvalidMorphism(format!("alphabet of size {k} is too large")));
        }
        for (a, img) in images.iter().enumerate() {
            if img.is_empty() {
                return Err(Error::InvalidMorphism(format!("image of letter {a} is empty")));
            }
            img.check_alphabet(k)?;
        }
        Ok(Morphism { images })
    }

    /// Convenience constructor from digit strings, e.g. `["01", "0"]`.
    pub fn from_digit_images(images: &[&str]) -> Result<Self> {
        images
            .iter()
            .map(|s| Word::parse_digits(s))
            .collect::<Result<Vec<_>>>()
            .and_then(Morphism::new)
    }

    /// The k-bonacci morphism `i -> 0(i+1)` for `i < k-1` and `k-1 -> 0`.
    pub fn kbonacci(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!("k-bonacci needs k >= 2, got {k}")));
        }
        let images = (0..k)
            .map(|i| if i + 1 < k { Word::from_indices([0, i + 1]) } else { Word::from_indices([0]) })
            .collect();
        Morphism::new(images)
    }

    pub fn fibonacci() -> Self {
        Self::kbonacci(2).expect("k = 2 is valid")
    }

    pub fn tribonacci() -> Self {
        Self::kbonacci(3).expect("k = 3 is valid")
    }

    pub fn alphabet_size(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, a: Letter) -> &Word {
        &self.images[a.index()]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    fn check_letter(&self, a: Letter) -> Result<()> {
        if a.index() < self.alphabet_size() {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch { letter: a.index(), alphabet_size: self.alphabet_size() })
        }
    }

    pub fn apply(&self, w: &[Letter]) -> Result<Word> {
        let mut out = Vec::with_capacity(w.len() * 2);
        for &l in w {
            self.check_letter(l)?;
            out.extend_from_slice(&self.images[l.index()]);
        }
        Ok(Word(out))
    }

    pub fn apply_n(&self, w: &[Letter], n: usize) -> Result<Word> {
        let mut cur = Word::from(w);
        for _ in 0..n {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    pub fn is_prolongable(&self, a: Letter) -> bool {
        self.images.get(a.index()).is_some_and(|img| img.len() >= 2 && img[0] == a)
    }

    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let k = self.alphabet_size();
        IncidenceMatrix(
            self.images
                .iter()
                .map(|img| {
                    let mut row = vec![0u64; k];
                    for l in img.iter() {
                        row[l.index()] += 1;
                    }
                    row
                })
                .collect(),
        )
    }

    /// `|phi^n(a)|` for every letter `a`, or `None` once a length overflows.
    pub fn letter_lengths(&self, n: usize) -> Option<Vec<u64>> {
        let mut cur = vec![1u64; self.alphabet_size()];
        for _ in 0..n {
            cur = self.next_lengths(&cur)?;
        }
        Some(cur)
    }

    /// One step of the length recurrence `L_{m+1}(a) = sum over phi(a) of L_m`.
    pub fn next_lengths(&self, cur: &[u64]) -> Option<Vec<u64>> {
        self.images
            .iter()
            .map(|img| img.iter().try_fold(0u64, |acc, l| acc.checked_add(cur[l.index()])))
            .collect()
    }

    /// `|phi^n(w)|` with overflow detection.
    pub fn word_length_after(&self, w: &[Letter], n: usize) -> Option<u64> {
        let lens = self.letter_lengths(n)?;
        w.iter().try_fold(0u64, |acc, l| acc.checked_add(lens[l.index()]))
    }

    pub fn to_json(&self) -> MorphismFile {
        MorphismFile {
            alphabet_size: Some(self.alphabet_size()),
            images: self.images.iter().map(|w| ImageSpec::Letters(w.indices())).collect(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: MorphismFile =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("morphism JSON: {e}")))?;
        file.into_morphism()
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, img) in self.images.iter().enumerate() {
            if a > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a} -> {img}")?;
        }
        Ok(())
    }
}

/// On-disk morphism description. Images are integer arrays in canonical
/// output; digit strings are accepted on input for alphabets of size <= 10.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphismFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet_size: Option<usize>,
    pub images: Vec<ImageSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ImageSpec {
    Letters(Vec<usize>),
    Digits(String),
}

impl MorphismFile {
    pub fn into_morphism(self) -> Result<Morphism> {
        let k = self.alphabet_size.unwrap_or(self.images.len());
        if k != self.images.len() {
            return Err(Error::InvalidMorphism(format!(
                "alphabet_size is {k} but {} images were given",
                self.images.len()
            )));
        }
        let images = self
            .images
            .into_iter()
            .map(|spec| match spec {
                ImageSpec::Letters(v) => {
                    if let Some(&bad) = v.iter().find(|&&l| l >= k) {
                        return Err(Error::AlphabetMismatch { letter: bad, alphabet_size: k });
                    }
                    Ok(Word::from_indices(v))
                }
                ImageSpec::Digits(s) => {
                    if k > 10 {
                        return Err(Error::InvalidMorphism(
                            "digit-string images need an alphabet of at most 10 letters".into(),
                        ));
                    }
                    Word::parse_digits(&s)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse_digits(s).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(Morphism::fibonacci().apply(&w("0")).unwrap(), w("01"));
        assert_eq!(Morphism::tribonacci().apply(&w("01")).unwrap(), w("0102"));
        assert_eq!(Morphism::tribonacci().apply(&[]).unwrap(), Word::empty());
        assert!(matches!(
            Morphism::fibonacci().apply(&w("2")),
            Err(Error::AlphabetMismatch { letter: 2, alphabet_size: 2 })
        ));
    }

    #[test]
    fn prolongability() {
        let fib = Morphism::fibonacci();
        assert!(fib.is_prolongable(Letter(0)));
        assert!(!fib.is_prolongable(Letter(1)));
        let id = Morphism::from_digit_images(&["0"]).unwrap();
        assert!(!id.is_prolongable(Letter(0)));
    }

    #[test]
    fn incidence_examples() {
        assert_eq!(Morphism::fibonacci().incidence_matrix().0, vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(
            Morphism::tribonacci().incidence_matrix().0,
            vec![vec![1, 1, 0], vec![1, 0, 1], vec![1, 0, 0]]
        );
        for k in 2..8 {
            let m = Morphism::kbonacci(k).unwrap().incidence_matrix();
            let mut last = vec![0; k];
            last[0] = 1;
            assert_eq!(m.row(k - 1), &last[..]);
        }
    }

    #[test]
    fn rejects_bad_morphisms() {
        assert!(Morphism::new(vec![]).is_err());
        assert!(Morphism::new(vec![Word::empty()]).is_err());
        assert!(Morphism::from_digit_images(&["02", "0"]).is_err());
        assert!(Morphism::kbonacci(1).is_err());
    }

    #[test]
    fn json_forms() {
        let m = Morphism::from_json_str(r#"{"images":["01","0"]}"#).unwrap();
        assert_eq!(m, Morphism::fibonacci());
        let m2 = Morphism::from_json_str(r#"{"alphabet_size":2,"images":[[0,1],[0]]}"#).unwrap();
        assert_eq!(m2, m);
        let out = serde_json::to_string(&m.to_json()).unwrap();
        assert_eq!(out, r#"{"alphabet_size":2,"images":[[0,1],[0]]}"#);
        assert!(Morphism::from_json_str(r#"{"alphabet_size":3,"images":["01","0"]}"#).is_err());
        assert!(Morphism::from_json_str("{").is_err());
    }
}
