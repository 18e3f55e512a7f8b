//! Caption metrics: BLEU-4, ROUGE-L and CIDEr over one shared tokenizer.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Replaces a zero n-gram precision in BLEU.
pub const BLEU_EPSILON: f64 = 1e-9;

/// Lowercases, then splits on whitespace with every punctuation character
/// emitted as its own token.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for c in text.chars().flat_map(char::to_lowercase) {
        if c.is_whitespace() {
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
        } else if c.is_alphanumeric() {
            word.push(c);
        } else {
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
            tokens.push(c.to_string());
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

/// Number of non-punctuation tokens.
pub fn word_count(text: &str) -> usize {
    tokenize(text)
        .iter()
        .filter(|t| t.chars().any(char::is_alphanumeric))
        .count()
}

fn ngram_counts(tokens: &[String], n: usize) -> BTreeMap<&[String], usize> {
    let mut counts = BTreeMap::new();
    if tokens.len() >= n {
        for g in tokens.windows(n) {
            *counts.entry(g).or_insert(0) += 1;
        }
    }
    counts
}

/// Sentence BLEU with uniform weights over 1..4-grams. The brevity penalty
/// uses the reference length closest to the candidate (shorter on ties).
pub fn bleu4(candidate: &[String], references: &[Vec<String>]) -> f64 {
    if candidate.is_empty() || references.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=4 {
        let cand = ngram_counts(candidate, n);
        let total: usize = cand.values().sum();
        let mut max_ref: BTreeMap<&[String], usize> = BTreeMap::new();
        for r in references {
            for (g, c) in ngram_counts(r, n) {
                let e = max_ref.entry(g).or_insert(0);
                *e = (*e).max(c);
            }
        }
        let clipped: usize = cand
            .iter()
            .map(|(g, &c)| c.min(max_ref.get(g).copied().unwrap_or(0)))
            .sum();
        let p = if total == 0 || clipped == 0 {
            BLEU_EPSILON
        } else {
            clipped as f64 / total as f64
        };
        log_sum += p.ln();
    }
    let c = candidate.len();
    let r = references
        .iter()
        .map(Vec::len)
        .min_by_key(|&len| (len.abs_diff(c), len))
        .unwrap();
    let bp = if c > r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    bp * (log_sum / 4.0).exp()
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// LCS F-measure with equal weight on precision and recall, best reference.
pub fn rouge_l(candidate: &[String], references: &[Vec<String>]) -> f64 {
    if candidate.is_empty() {
        return 0.0;
    }
    references
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| {
            let l = lcs_len(candidate, r) as f64;
            if l == 0.0 {
                return 0.0;
            }
            let p = l / candidate.len() as f64;
            let rc = l / r.len() as f64;
            2.0 * p * rc / (p + rc)
        })
        .fold(0.0, f64::max)
}

type Vector<'a> = BTreeMap<&'a [String], f64>;

fn tfidf<'a>(tokens: &'a [String], n: usize, idf: &impl Fn(&[String]) -> f64) -> Vector<'a> {
    ngram_counts(tokens, n)
        .into_iter()
        .map(|(g, c)| (g, c as f64 * idf(g)))
        .collect()
}

fn cosine(a: &Vector<'_>, b: &Vector<'_>) -> f64 {
    let dot: f64 = a.iter().filter_map(|(g, x)| b.get(g).map(|y| x * y)).sum();
    let na = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Per-pair CIDEr scores.
///
/// Document frequencies come from the reference sets of this corpus, with
/// the smoothed inverse frequency `ln((1 + N) / (1 + df)) + 1`. Each pair
/// scores the mean over n = 1..4 of `10 * cos(candidate, mean reference)`;
/// a side with no n-grams of order n contributes 0 for that order.
pub fn cider_scores(corpus: &[(Vec<String>, Vec<Vec<String>>)]) -> Result<Vec<f64>> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let docs = corpus.len() as f64;
    let mut scores = vec![0.0; corpus.len()];
    for n in 1..=4 {
        let mut df: BTreeMap<&[String], usize> = BTreeMap::new();
        for (_, refs) in corpus {
            let grams: BTreeSet<&[String]> = refs.iter().flat_map(|r| ngram_counts(r, n).into_keys()).collect();
            for g in grams {
                *df.entry(g).or_insert(0) += 1;
            }
        }
        let idf = |g: &[String]| ((1.0 + docs) / (1.0 + df.get(g).copied().unwrap_or(0) as f64)).ln() + 1.0;
        for (score, (cand, refs)) in scores.iter_mut().zip(corpus) {
            let cv = tfidf(cand, n, &idf);
            let mut mean: Vector<'_> = BTreeMap::new();
            for r in refs {
                for (g, v) in tfidf(r, n, &idf) {
                    *mean.entry(g).or_insert(0.0) += v;
                }
            }
            let k = refs.len().max(1) as f64;
            mean.values_mut().for_each(|v| *v /= k);
            *score += 10.0 * cosine(&cv, &mean) / 4.0;
        }
    }
    Ok(scores)
}

/// Corpus CIDEr: the mean of [`cider_scores`].
pub fn cider(corpus: &[(Vec<String>, Vec<Vec<String>>)]) -> Result<f64> {
    let s = cider_scores(corpus)?;
    Ok(s.iter().sum::<f64>() / s.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextScores {
    pub bleu4: f64,
    #[serde(rename = "rougeL")]
    pub rouge_l: f64,
    pub cider: f64,
    pub n: usize,
}

/// Tokenizes raw strings and scores the whole corpus. BLEU-4 and ROUGE-L
/// are sentence-level means.
pub fn score_corpus(pairs: &[(String, Vec<String>)]) -> Result<TextScores> {
    if pairs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let corpus: Vec<(Vec<String>, Vec<Vec<String>>)> = pairs
        .iter()
        .map(|(c, refs)| (tokenize(c), refs.iter().map(|r| tokenize(r)).collect()))
        .collect();
    let n = corpus.len() as f64;
    let bleu = corpus.iter().map(|(c, r)| bleu4(c, r)).sum::<f64>() / n;
    let rouge = corpus.iter().map(|(c, r)| rouge_l(c, r)).sum::<f64>() / n;
    Ok(TextScores {
        bleu4: bleu,
        rouge_l: rouge,
        cider: cider(&corpus)?,
        n: corpus.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn tokenizer() {
        assert_eq!(t("The cat, sat."), ["the", "cat", ",", "sat", "."]);
        assert_eq!(t("  don't  "), ["don", "'", "t"]);
        assert!(t("").is_empty());
        assert_eq!(word_count("Is the dog, on the left?"), 6);
    }

    #[test]
    fn bleu_golden() {
        let c = t("the cat sat on the mat");
        assert!((bleu4(&c, std::slice::from_ref(&c)) - 1.0).abs() < 1e-12);
        // clipped precisions 5/6, 3/5, 2/4, 1/3; equal lengths so no penalty
        let want = (1.0f64 / 12.0).powf(0.25);
        assert!((bleu4(&c, &[t("the cat sat on a mat")]) - want).abs() < 1e-12);
        assert!(bleu4(&c, &[t("dogs run fast here now")]) < 1e-8);
        assert_eq!(bleu4(&[], std::slice::from_ref(&c)), 0.0);
    }

    #[test]
    fn bleu_brevity_penalty() {
        let c = t("a b c d");
        let r = t("a b c d e f g h");
        assert!((bleu4(&c, &[r]) - (1.0f64 - 2.0).exp()).abs() < 1e-12);
        // closest length wins
        assert!((bleu4(&c, &[t("a b c d e f g h"), t("a b c d x")]) - (1.0f64 - 5.0 / 4.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn rouge_golden() {
        assert!((rouge_l(&t("the cat sat"), &[t("the dog sat")]) - 2.0 / 3.0).abs() < 1e-12);
        assert!((rouge_l(&t("the cat sat on the mat"), &[t("the cat sat on a mat")]) - 5.0 / 6.0).abs() < 1e-12);
        assert_eq!(rouge_l(&t("x y"), &[t("a b")]), 0.0);
        assert_eq!(rouge_l(&t("a b c"), &[t("x"), t("a b c")]), 1.0);
        assert_eq!(rouge_l(&[], &[t("a")]), 0.0);
    }

    #[test]
    fn cider_golden() {
        let c = t("a man rides a red bike");
        assert!((cider(&[(c.clone(), vec![c.clone()])]).unwrap() - 10.0).abs() < 1e-9);
        assert_eq!(cider(&[(t("x y z w"), vec![t("a b c d")])]).unwrap(), 0.0);
        assert!(matches!(cider(&[]), Err(Error::EmptyCorpus)));

        // Two pairs, N = 2. Pair one is a 2-token self match: cosine 1 at
        // n = 1, 2 and no 3/4-grams, so 10 * 2 / 4 = 5. Pair two shares only
        // "a" at n = 1 with idf(a) = 1, idf(c) = 1 + ln 3, idf(d) = 1 + ln 1.5.
        let corpus = vec![(t("a b"), vec![t("a b")]), (t("a c"), vec![t("a d")])];
        let ic = 1.0 + 3f64.ln();
        let id = 1.0 + 1.5f64.ln();
        let cos1 = 1.0 / ((1.0 + ic * ic).sqrt() * (1.0 + id * id).sqrt());
        let want = (5.0 + 2.5 * cos1) / 2.0;
        assert!((cider(&corpus).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn corpus_scores() {
        let pairs = vec![
            ("The cat sat.".to_string(), vec!["the cat sat .".to_string()]),
            ("A dog".to_string(), vec!["a dog".to_string(), "the dog".to_string()]),
        ];
        let s = score_corpus(&pairs).unwrap();
        assert_eq!(s.n, 2);
        assert!((s.rouge_l - 1.0).abs() < 1e-12);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"rougeL\""));
    }

    fn sentence() -> impl Strategy<Value = Vec<String>> {
        proptest::collection::vec(prop_oneof!["a", "b", "c", "d", "e"].prop_map(String::from), 0..9)
    }

    proptest! {
        #[test]
        fn bounded_and_self_maximal(c in sentence(), r1 in sentence(), r2 in sentence()) {
            let refs = vec![r1.clone(), r2.clone()];
            let b = bleu4(&c, &refs);
            let r = rouge_l(&c, &refs);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&b));
            prop_assert!((0.0..=1.0).contains(&r));
            if !c.is_empty() {
                prop_assert!((rouge_l(&c, &[c.clone(), r1.clone()]) - 1.0).abs() < 1e-12);
            }
            if c.len() >= 4 {
                prop_assert!((bleu4(&c, std::slice::from_ref(&c)) - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn reference_order_irrelevant(c in sentence(), r1 in sentence(), r2 in sentence(), other in sentence()) {
            let a = vec![r1.clone(), r2.clone()];
            let b = vec![r2, r1];
            prop_assert_eq!(bleu4(&c, &a), bleu4(&c, &b));
            prop_assert_eq!(rouge_l(&c, &a), rouge_l(&c, &b));
            let ca = cider(&[(c.clone(), a), (other.clone(), vec![other.clone()])]).unwrap();
            let cb = cider(&[(c.clone(), b), (other.clone(), vec![other])]).unwrap();
            prop_assert!((ca - cb).abs() < 1e-12);
            prop_assert!(ca >= 0.0);
        }
    }
}
