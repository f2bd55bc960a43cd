//! Corpus post-processing: MinHash-LSH near-duplicate removal.
//!
//! Documents are shingled into word 5-grams, sketched with seeded MinHash
//! signatures, and banded into an LSH index whose collision threshold sits
//! at `(1/b)^(1/r)` — about 0.707 for the default 16 bands of 8 rows.
//! Candidate pairs are always re-checked with exact Jaccard similarity
//! before anything is removed, so post-verification precision is 1.0 by
//! construction.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

mod decontam;

pub use decontam::{
    build_formula_index, decontaminate, extract_formulas, normalize_formula, DecontamReport,
    FormulaIndex, FORMULA_NORMALIZATION_VERSION,
};

/// One corpus document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusDoc {
    pub id: String,
    pub text: String,
}

/// Errors from corpus operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CorpusError {
    #[error("document `{0}` produced no shingles")]
    EmptyDocument(String),
    #[error("bands * rows = {bands}*{rows} != permutations {permutations}")]
    BandShapeMismatch {
        bands: usize,
        rows: usize,
        permutations: usize,
    },
    #[error("threshold {0} outside (0, 1)")]
    BadThreshold(f64),
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
}

/// Deduplication parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DedupConfig {
    pub permutations: usize,
    pub bands: usize,
    pub rows: usize,
    /// Pairs with exact Jaccard strictly above this are duplicates.
    pub threshold: f64,
    pub seed: u64,
}

impl Default for DedupConfig {
    fn default() -> Self {
        // The S-curve midpoint (1/16)^(1/8) = 2^(-1/2) ≈ 0.7071 matches the
        // 0.7 similarity cutoff.
        DedupConfig {
            permutations: 128,
            bands: 16,
            rows: 8,
            threshold: 0.7,
            seed: 0x5EED,
        }
    }
}

impl DedupConfig {
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.bands * self.rows != self.permutations {
            return Err(CorpusError::BandShapeMismatch {
                bands: self.bands,
                rows: self.rows,
                permutations: self.permutations,
            });
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(CorpusError::BadThreshold(self.threshold));
        }
        Ok(())
    }

    /// The banding S-curve midpoint `(1/b)^(1/r)`: the similarity at which
    /// collision probability crosses one half.
    pub fn threshold_estimate(&self) -> f64 {
        (1.0 / self.bands as f64).powf(1.0 / self.rows as f64)
    }
}

/// Word-level 5-grams over whitespace-tokenized, lowercased text. Documents
/// shorter than five tokens yield one whole-document shingle.
pub fn shingle(text: &str) -> Vec<String> {
    const WIDTH: usize = 5;
    let tokens: Vec<String> = text
        .split_whitespace()
        .map(|t| t.to_lowercase())
        .collect();
    if tokens.is_empty() {
        return Vec::new();
    }
    if tokens.len() < WIDTH {
        return vec![tokens.join(" ")];
    }
    tokens
        .windows(WIDTH)
        .map(|w| w.join(" "))
        .collect()
}

/// 64-bit FNV-1a with an avalanche finish; fixed, platform-independent.
fn hash64(bytes: &[u8], seed: u64) -> u64 {
    let mut h = 0xcbf29ce484222325u64 ^ seed;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    // splitmix64 finalizer
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58476d1ce4e5b9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94d049bb133111eb);
    h ^ (h >> 31)
}

/// The deduplicated shingle set as 64-bit hashes.
pub fn shingle_set(text: &str) -> HashSet<u64> {
    shingle(text)
        .iter()
        .map(|s| hash64(s.as_bytes(), 0))
        .collect()
}

/// A MinHash signature: one minimum per permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinHashSignature {
    pub values: Vec<u64>,
}

impl MinHashSignature {
    /// Fraction of agreeing positions: the unbiased Jaccard estimate.
    pub fn agreement(&self, other: &MinHashSignature) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        let matching = self
            .values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| a == b)
            .count();
        matching as f64 / self.values.len() as f64
    }
}

/// MinHash over a shingle set: permutation `k` is a seeded remix of the
/// base shingle hash, and the signature entry is its minimum.
pub fn minhash(
    shingles: &HashSet<u64>,
    permutations: usize,
    seed: u64,
) -> Result<MinHashSignature, CorpusError> {
    if shingles.is_empty() {
        return Err(CorpusError::EmptyDocument(String::new()));
    }
    let values = (0..permutations as u64)
        .map(|k| {
            shingles
                .iter()
                .map(|&s| hash64(&s.to_le_bytes(), seed.wrapping_add(k).wrapping_mul(0x9E3779B97F4A7C15)))
                .min()
                .expect("non-empty shingle set")
        })
        .collect();
    Ok(MinHashSignature { values })
}

/// Exact Jaccard similarity `|a ∩ b| / |a ∪ b|` of two shingle sets.
pub fn jaccard_exact(a: &HashSet<u64>, b: &HashSet<u64>) -> Result<f64, CorpusError> {
    if a.is_empty() || b.is_empty() {
        return Err(CorpusError::EmptyDocument(String::new()));
    }
    let intersection = a.intersection(b).count();
    let union = a.len() + b.len() - intersection;
    Ok(intersection as f64 / union as f64)
}

/// Banding index over MinHash signatures.
#[derive(Debug)]
pub struct LshIndex {
    bands: usize,
    rows: usize,
    /// Per band: band-hash → document positions.
    buckets: Vec<HashMap<u64, Vec<usize>>>,
}

impl LshIndex {
    pub fn build(signatures: &[MinHashSignature], config: &DedupConfig) -> Result<LshIndex, CorpusError> {
        config.validate()?;
        let mut buckets: Vec<HashMap<u64, Vec<usize>>> = vec![HashMap::new(); config.bands];
        for (doc, sig) in signatures.iter().enumerate() {
            for band in 0..config.bands {
                let slice = &sig.values[band * config.rows..(band + 1) * config.rows];
                let mut bytes = Vec::with_capacity(config.rows * 8);
                for v in slice {
                    bytes.extend_from_slice(&v.to_le_bytes());
                }
                let key = hash64(&bytes, band as u64);
                buckets[band].entry(key).or_default().push(doc);
            }
        }
        Ok(LshIndex {
            bands: config.bands,
            rows: config.rows,
            buckets,
        })
    }

    /// All candidate pairs: documents sharing at least one band bucket.
    pub fn candidate_pairs(&self) -> BTreeSet<(usize, usize)> {
        let mut pairs = BTreeSet::new();
        for band in &self.buckets {
            for docs in band.values() {
                if docs.len() > 1 {
                    for i in 0..docs.len() {
                        for j in (i + 1)..docs.len() {
                            let (a, b) = (docs[i].min(docs[j]), docs[i].max(docs[j]));
                            pairs.insert((a, b));
                        }
                    }
                }
            }
        }
        pairs
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.bands, self.rows)
    }
}

/// A verified duplicate pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DupPair {
    pub id_a: String,
    pub id_b: String,
    pub jaccard: f64,
}

/// Outcome of a dedup run.
#[derive(Debug)]
pub struct DedupOutcome {
    pub kept: Vec<CorpusDoc>,
    pub removed: Vec<CorpusDoc>,
    /// Verified pairs above threshold, sorted by id.
    pub pairs: Vec<DupPair>,
    /// LSH candidate pairs before verification.
    pub candidates_checked: usize,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Removes near-duplicates: LSH candidates, exact-Jaccard verification
/// strictly above the threshold, union-find clustering, and one survivor
/// per cluster (the lexicographically smallest id).
pub fn dedup(docs: &[CorpusDoc], config: &DedupConfig) -> Result<DedupOutcome, CorpusError> {
    config.validate()?;
    {
        let mut seen = HashSet::new();
        for d in docs {
            if !seen.insert(&d.id) {
                return Err(CorpusError::DuplicateId(d.id.clone()));
            }
        }
    }

    let shingle_sets: Vec<HashSet<u64>> =
        docs.par_iter().map(|d| shingle_set(&d.text)).collect();
    for (doc, set) in docs.iter().zip(&shingle_sets) {
        if set.is_empty() {
            return Err(CorpusError::EmptyDocument(doc.id.clone()));
        }
    }
    let signatures: Vec<MinHashSignature> = shingle_sets
        .par_iter()
        .map(|s| minhash(s, config.permutations, config.seed).expect("non-empty set"))
        .collect();

    let index = LshIndex::build(&signatures, config)?;
    let candidates = index.candidate_pairs();
    let candidates_checked = candidates.len();

    // Verify every candidate exactly; only strict exceedance removes.
    let verified: Vec<(usize, usize, f64)> = candidates
        .into_iter()
        .collect::<Vec<_>>()
        .par_iter()
        .filter_map(|&(a, b)| {
            let j = jaccard_exact(&shingle_sets[a], &shingle_sets[b]).expect("non-empty sets");
            (j > config.threshold).then_some((a, b, j))
        })
        .collect();

    let mut uf = UnionFind::new(docs.len());
    for &(a, b, _) in &verified {
        uf.union(a, b);
    }

    // Within each duplicate cluster keep the lexicographically smallest id.
    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..docs.len() {
        clusters.entry(uf.find(i)).or_default().push(i);
    }
    let mut removed_positions: HashSet<usize> = HashSet::new();
    for members in clusters.values() {
        if members.len() > 1 {
            let keeper = *members
                .iter()
                .min_by_key(|&&i| &docs[i].id)
                .expect("non-empty cluster");
            for &m in members {
                if m != keeper {
                    removed_positions.insert(m);
                }
            }
        }
    }

    let mut pairs: Vec<DupPair> = verified
        .into_iter()
        .map(|(a, b, j)| {
            let (ia, ib) = if docs[a].id <= docs[b].id { (a, b) } else { (b, a) };
            DupPair {
                id_a: docs[ia].id.clone(),
                id_b: docs[ib].id.clone(),
                jaccard: j,
            }
        })
        .collect();
    pairs.sort_by(|x, y| (&x.id_a, &x.id_b).cmp(&(&y.id_a, &y.id_b)));

    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for (i, doc) in docs.iter().enumerate() {
        if removed_positions.contains(&i) {
            removed.push(doc.clone());
        } else {
            kept.push(doc.clone());
        }
    }

    Ok(DedupOutcome {
        kept,
        removed,
        pairs,
        candidates_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, text: &str) -> CorpusDoc {
        CorpusDoc {
            id: id.to_string(),
            text: text.to_string(),
        }
    }

    fn words(n: usize, tag: &str) -> String {
        (0..n).map(|i| format!("{tag}{i}")).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn shingle_counts() {
        assert_eq!(shingle("one two three four five").len(), 1);
        assert_eq!(shingle(&words(12, "w")).len(), 12 - 4);
        assert_eq!(shingle("short text"), vec!["short text".to_string()]);
        assert!(shingle("").is_empty());
        // Identical texts shingle identically; case folds.
        assert_eq!(shingle("A B C D E F"), shingle("a b c d e f"));
    }

    #[test]
    fn jaccard_basics() {
        let a = shingle_set(&words(30, "x"));
        assert_eq!(jaccard_exact(&a, &a).unwrap(), 1.0);
        let b = shingle_set(&words(30, "y"));
        assert_eq!(jaccard_exact(&a, &b).unwrap(), 0.0);
        assert!(jaccard_exact(&a, &HashSet::new()).is_err());
    }

    #[test]
    fn jaccard_two_of_four() {
        // {x, y, z} vs {x, y, w} → 2/4.
        let a: HashSet<u64> = [1u64, 2, 3].into_iter().collect();
        let b: HashSet<u64> = [1u64, 2, 4].into_iter().collect();
        assert_eq!(jaccard_exact(&a, &b).unwrap(), 0.5);
    }

    #[test]
    fn minhash_deterministic_and_sensitive_to_seed() {
        let s = shingle_set(&words(40, "tok"));
        let a = minhash(&s, 64, 7).unwrap();
        let b = minhash(&s, 64, 7).unwrap();
        assert_eq!(a, b);
        let c = minhash(&s, 64, 8).unwrap();
        assert_ne!(a, c);
        assert!(minhash(&HashSet::new(), 64, 7).is_err());
    }

    #[test]
    fn identical_docs_identical_signatures() {
        let a = minhash(&shingle_set("the quick brown fox jumps over the dog"), 128, 1).unwrap();
        let b = minhash(&shingle_set("the quick brown fox jumps over the dog"), 128, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.agreement(&b), 1.0);
    }

    #[test]
    fn default_threshold_estimate_is_0707() {
        let estimate = DedupConfig::default().threshold_estimate();
        assert!((estimate - 0.7071067811865476).abs() < 1e-12, "{estimate}");
    }

    #[test]
    fn config_validation() {
        let mut config = DedupConfig::default();
        config.rows = 7;
        assert!(matches!(config.validate(), Err(CorpusError::BandShapeMismatch { .. })));
        let mut config = DedupConfig::default();
        config.threshold = 1.0;
        assert!(matches!(config.validate(), Err(CorpusError::BadThreshold(_))));
    }

    #[test]
    fn dedup_identical_pair() {
        let text = words(40, "tok");
        let docs = vec![doc("b", &text), doc("a", &text), doc("c", &words(40, "other"))];
        let out = dedup(&docs, &DedupConfig::default()).unwrap();
        assert_eq!(out.kept.len(), 2);
        assert_eq!(out.removed.len(), 1);
        // Lexicographically smallest id survives.
        assert_eq!(out.removed[0].id, "b");
        assert_eq!(out.pairs.len(), 1);
        assert_eq!(out.pairs[0].jaccard, 1.0);
        assert_eq!((out.pairs[0].id_a.as_str(), out.pairs[0].id_b.as_str()), ("a", "b"));
    }

    #[test]
    fn dedup_keeps_distinct_docs() {
        let docs: Vec<CorpusDoc> = (0..20)
            .map(|i| doc(&format!("d{i:02}"), &words(30, &format!("tok{i}x"))))
            .collect();
        let out = dedup(&docs, &DedupConfig::default()).unwrap();
        assert_eq!(out.kept.len(), 20);
        assert!(out.pairs.is_empty());
    }

    #[test]
    fn planted_cluster_keeps_one() {
        // Ten near-identical docs (one token changed out of ~60).
        let base: Vec<String> = (0..60).map(|i| format!("w{i}")).collect();
        let mut docs = Vec::new();
        for v in 0..10 {
            let mut tokens = base.clone();
            tokens[59] = format!("variant{v}");
            docs.push(doc(&format!("n{v}"), &tokens.join(" ")));
        }
        let out = dedup(&docs, &DedupConfig::default()).unwrap();
        assert_eq!(out.kept.len(), 1, "cluster keeps exactly one survivor");
        assert_eq!(out.kept[0].id, "n0");
    }

    #[test]
    fn dedup_rejects_duplicate_ids() {
        let docs = vec![doc("a", &words(10, "x")), doc("a", &words(10, "y"))];
        assert!(matches!(
            dedup(&docs, &DedupConfig::default()),
            Err(CorpusError::DuplicateId(_))
        ));
    }

    #[test]
    fn dedup_order_insensitive_partition() {
        let text = words(40, "tok");
        let mut docs = vec![
            doc("a", &text),
            doc("b", &text),
            doc("c", &words(40, "zzz")),
            doc("d", &words(45, "qqq")),
        ];
        let out1 = dedup(&docs, &DedupConfig::default()).unwrap();
        docs.reverse();
        let out2 = dedup(&docs, &DedupConfig::default()).unwrap();
        let ids = |v: &[CorpusDoc]| {
            let mut ids: Vec<String> = v.iter().map(|d| d.id.clone()).collect();
            ids.sort();
            ids
        };
        assert_eq!(ids(&out1.removed), ids(&out2.removed));
        assert_eq!(ids(&out1.kept), ids(&out2.kept));
    }
}
