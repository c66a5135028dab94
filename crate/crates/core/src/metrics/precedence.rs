//! Whether trigrams appear after their component bigrams.

use serde::{Deserialize, Serialize};

use crate::forms::ValidatedFormSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecedenceStats {
    /// Trigrams whose two component bigrams are both validated forms.
    pub qualifying: usize,
    /// Qualifying trigrams first published strictly after both bigrams.
    pub after_bigrams: usize,
    /// Qualifying trigrams whose bigrams co-occurred in a document strictly
    /// before the trigram's first year.
    pub after_co: usize,
    pub frac_after_bigrams: Option<f64>,
    pub frac_after_co: Option<f64>,
}

/// Earliest year of a document containing both forms.
fn first_co_year(forms: &ValidatedFormSet, a: usize, b: usize) -> Option<i32> {
    let (fa, fb) = (&forms.forms()[a], &forms.forms()[b]);
    let (small, large) = if fa.docs.len() <= fb.docs.len() { (fa, fb) } else { (fb, fa) };
    small
        .docs
        .iter()
        .filter(|(d, _)| large.docs.contains_key(*d))
        .map(|(_, &y)| y)
        .min()
}

/// The components of `q1 q2 anchor` are `q1 anchor` and `q2 anchor`.
pub fn trigram_precedence_stats(forms: &ValidatedFormSet) -> PrecedenceStats {
    let (mut qualifying, mut after_bigrams, mut after_co) = (0, 0, 0);
    for tri in forms.trigrams() {
        let anchor = &tri.terms[2];
        let a = forms.index_of(&format!("{} {anchor}", tri.terms[0]));
        let b = forms.index_of(&format!("{} {anchor}", tri.terms[1]));
        let (Some(a), Some(b)) = (a, b) else { continue };
        if a == b {
            continue;
        }
        qualifying += 1;
        let (ya, yb) = (forms.forms()[a].first_year, forms.forms()[b].first_year);
        if tri.first_year > ya && tri.first_year > yb {
            after_bigrams += 1;
        }
        if first_co_year(forms, a, b).is_some_and(|y| y < tri.first_year) {
            after_co += 1;
        }
    }
    let frac = |k: usize| (qualifying > 0).then(|| k as f64 / qualifying as f64);
    PrecedenceStats {
        qualifying,
        after_bigrams,
        after_co,
        frac_after_bigrams: frac(after_bigrams),
        frac_after_co: frac(after_co),
    }
}
