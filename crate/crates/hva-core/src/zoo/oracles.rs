//! Brute-force language membership oracles and input generators for the
//! catalog. Every oracle is written directly from the language definition
//! with no reference to the machines, so that disagreement between the two
//! is meaningful evidence of a defect.

use crate::freegroup::GroupWord;
use crate::sternbrocot;

/// Splits `s` into maximal runs of identical characters: "aabc" becomes
/// [(a,2),(b,1),(c,1)].
fn runs(s: &str) -> Vec<(char, usize)> {
    let mut out: Vec<(char, usize)> = Vec::new();
    for c in s.chars() {
        match out.last_mut() {
            Some((last, n)) if *last == c => *n += 1,
            _ => out.push((c, 1)),
        }
    }
    out
}

/// Counts of the maximal blocks when `s` has the exact shape
/// a^n b^p a^q (each count may be zero).
fn aba_blocks(s: &str) -> Option<(usize, usize, usize)> {
    let mut n = 0;
    let mut p = 0;
    let mut q = 0;
    for (c, len) in runs(s) {
        match c {
            'a' if p == 0 && q == 0 && n == 0 => n = len,
            'b' if p == 0 && q == 0 => p = len,
            'a' if p > 0 && q == 0 => q = len,
            _ => return None,
        }
    }
    Some((n, p, q))
}

/// Block counts when `s` has the exact shape a^i b^j c^k.
fn abc_blocks(s: &str) -> Option<(usize, usize, usize)> {
    let mut counts = [0usize; 3];
    let mut phase = 0;
    for (c, len) in runs(s) {
        let slot = match c {
            'a' => 0,
            'b' => 1,
            'c' => 2,
            _ => return None,
        };
        if slot < phase {
            return None;
        }
        phase = slot;
        counts[slot] += len;
    }
    Some((counts[0], counts[1], counts[2]))
}

/// a^n b^p a^q with maximal blocks, accepted when n = p or n = p + q.
pub(crate) fn thm51(s: &str) -> bool {
    match aba_blocks(s) {
        Some((n, p, q)) => n == p || n == p + q,
        None => false,
    }
}

/// Unary strings of length n + 2^n for some n >= 1.
pub(crate) fn upow(s: &str) -> bool {
    if s.chars().any(|c| c != 'a') {
        return false;
    }
    let len = s.len();
    (1..62).map(|n| n + (1usize << n)).take_while(|&l| l <= len).any(|l| l == len)
}

/// a^n b^m with m = 2^n (n >= 0).
pub(crate) fn pow(s: &str) -> bool {
    match abc_blocks(s) {
        Some((n, m, 0)) => n < usize::BITS as usize && m == 1usize << n,
        _ => false,
    }
}

/// a^m b^n with m = 2^n (n >= 0).
pub(crate) fn pow_r(s: &str) -> bool {
    match abc_blocks(s) {
        Some((m, n, 0)) => n < usize::BITS as usize && m == 1usize << n,
        _ => false,
    }
}

/// a^n b^n.
pub(crate) fn anbn(s: &str) -> bool {
    matches!(abc_blocks(s), Some((n, m, 0)) if n == m)
}

/// a^n b^2n.
pub(crate) fn anb2n(s: &str) -> bool {
    matches!(abc_blocks(s), Some((n, m, 0)) if m == 2 * n)
}

/// a^n b^n c^n.
pub(crate) fn abc_counters(s: &str) -> bool {
    matches!(abc_blocks(s), Some((i, j, k)) if i == j && j == k)
}

/// Union of a^n b^n and a^n b^2n. No deterministic machine of the kind
/// this library executes accepts this language; it exists as an oracle
/// only, for checking constructions built from the two halves.
pub(crate) fn union(s: &str) -> bool {
    anbn(s) || anb2n(s)
}

/// Union of a^n b^n and a^n b^2n c. Oracle only.
pub(crate) fn union_c(s: &str) -> bool {
    if anbn(s) {
        return true;
    }
    match s.strip_suffix('c') {
        Some(prefix) => anb2n(prefix),
        None => false,
    }
}

/// b^n (a^n b^n)^k with n >= 1 and k >= 1. Oracle only.
pub(crate) fn l_bab(s: &str) -> bool {
    let r = runs(s);
    if r.is_empty() || r[0].0 != 'b' {
        return false;
    }
    let n = r[0].1;
    let body = &r[1..];
    // The remainder must be k >= 1 exact repetitions of a^n b^n, which as
    // maximal runs is an alternating sequence a^n b^n a^n b^n ... .
    if body.is_empty() || !body.len().is_multiple_of(2) {
        return false;
    }
    body.iter().enumerate().all(|(i, &(c, len))| {
        let expected = if i % 2 == 0 { 'a' } else { 'b' };
        c == expected && len == n
    })
}

/// a^i b^j c^k with i != j or j > k. Oracle only.
pub(crate) fn ijk(s: &str) -> bool {
    matches!(abc_blocks(s), Some((i, j, k)) if i != j || j > k)
}

/// w # reverse(w) over the l-letter indexed alphabet.
pub(crate) fn mpal(l: usize, s: &str) -> bool {
    let Ok(symbols) = sternbrocot::index_symbols(l) else {
        return false;
    };
    let parts: Vec<&str> = s.split('#').collect();
    if parts.len() != 2 {
        return false;
    }
    let (w, u) = (parts[0], parts[1]);
    if w.chars().any(|c| !symbols.contains(&c)) {
        return false;
    }
    u.chars().eq(w.chars().rev())
}

/// The value of a bit string written least-significant bit first, or None
/// when empty or not over {0,1}.
fn lsb_value(bits: &str) -> Option<u128> {
    if bits.is_empty() || bits.len() > 100 {
        return None;
    }
    let mut value = 0u128;
    for (i, c) in bits.chars().enumerate() {
        match c {
            '0' => {}
            '1' => value += 1 << i,
            _ => return None,
        }
    }
    Some(value)
}

/// t#x1#...#xm# (every number least-significant bit first, m >= 1, every
/// segment nonempty) such that some subset of {x1..xm} sums to t.
pub(crate) fn subsetsum_r(s: &str) -> bool {
    let Some(body) = s.strip_suffix('#') else {
        return false;
    };
    let segments: Vec<&str> = body.split('#').collect();
    if segments.len() < 2 {
        return false;
    }
    let mut values = Vec::with_capacity(segments.len());
    for segment in segments {
        match lsb_value(segment) {
            Some(v) => values.push(v),
            None => return false,
        }
    }
    let target = values[0];
    let numbers = &values[1..];
    (0u64..1 << numbers.len()).any(|mask| {
        let sum: u128 =
            numbers.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v).sum();
        sum == target
    })
}

/// Words over {a, A, b, B} that reduce to the identity of the free group.
pub(crate) fn wp_f2(s: &str) -> bool {
    match GroupWord::parse(s) {
        Ok(w) => w.is_identity(),
        Err(_) => false,
    }
}

/// Words over {a, A, b, B} whose a/A subsequence and b/B subsequence each
/// reduce to the identity independently.
pub(crate) fn wp_f2xf2(s: &str) -> bool {
    let left: String = s.chars().filter(|c| matches!(c, 'a' | 'A')).collect();
    let right: String = s.chars().filter(|c| matches!(c, 'b' | 'B')).collect();
    match (GroupWord::parse(&left), GroupWord::parse(&right)) {
        (Ok(l), Ok(r)) => l.is_identity() && r.is_identity(),
        _ => false,
    }
}

/// The canonical least-significant-bit-first encoding of a value: "0" for
/// zero, otherwise the bits up to and including the leading one.
pub fn lsb_encoding(value: u64) -> String {
    if value == 0 {
        return "0".to_owned();
    }
    let mut bits = String::new();
    let mut v = value;
    while v > 0 {
        bits.push(if v & 1 == 1 { '1' } else { '0' });
        v >>= 1;
    }
    bits
}

/// Every well-formed subset-sum instance t#x1#...#xm# with 1 <= m <=
/// `max_numbers` numbers and all values in 0..=`max_value`, each written
/// in canonical least-significant-bit-first form.
pub fn subsetsum_instances(max_value: u64, max_numbers: usize) -> Vec<String> {
    let tokens: Vec<String> = (0..=max_value).map(lsb_encoding).collect();
    let mut out = Vec::new();
    // Number lists of each length, built by repeated cartesian extension.
    let mut lists: Vec<String> = vec![String::new()];
    for _ in 0..max_numbers {
        lists = lists
            .iter()
            .flat_map(|prefix| tokens.iter().map(move |t| format!("{prefix}{t}#")))
            .collect();
        for target in &tokens {
            for list in &lists {
                out.push(format!("{target}#{list}"));
            }
        }
    }
    out
}

/// All strings of length up to `max_len` over `alphabet`, in order of
/// length and then lexicographically by symbol index.
pub fn strings_over(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for s in &layer {
            for &c in alphabet {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// The unary strings a^0 .. a^max_len.
pub fn unary_strings(symbol: char, max_len: usize) -> Vec<String> {
    (0..=max_len).map(|n| symbol.to_string().repeat(n)).collect()
}

/// Every two-block string a^n b^m with n + m <= max_total, including the
/// pure blocks and the empty string.
pub fn ab_blocks(max_total: usize) -> Vec<String> {
    let mut out = Vec::new();
    for n in 0..=max_total {
        for m in 0..=(max_total - n) {
            out.push(format!("{}{}", "a".repeat(n), "b".repeat(m)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thm51_matches_block_conditions() {
        for (input, expected) in [
            ("", true),
            ("ab", true),
            ("aabb", true),
            ("aba", true),
            ("abaa", true),
            ("aaabba", true),
            ("aabba", true),
            ("aaa", false),
            ("a", false),
            ("b", false),
            ("ba", false),
            ("aabbba", false),
            ("abab", false),
            ("aabbaab", false),
        ] {
            assert_eq!(thm51(input), expected, "thm51 oracle on {input:?}");
        }
    }

    #[test]
    fn upow_accepts_exactly_n_plus_two_to_n() {
        let accepted: Vec<usize> = (0..=70).filter(|&n| upow(&"a".repeat(n))).collect();
        assert_eq!(accepted, vec![3, 6, 11, 20, 37, 70]);
        assert!(!upow("ab"));
    }

    #[test]
    fn power_languages() {
        assert!(pow("b"));
        assert!(pow("abb"));
        assert!(pow("aabbbb"));
        assert!(!pow(""));
        assert!(!pow("ab"));
        assert!(!pow("ba"));
        assert!(pow_r("a"));
        assert!(pow_r("aab"));
        assert!(pow_r("aaaabb"));
        assert!(!pow_r(""));
        assert!(!pow_r("ab"));
        assert!(!pow_r("aabb"));
    }

    #[test]
    fn block_count_languages() {
        assert!(anbn("aabb") && !anbn("aab") && anbn(""));
        assert!(anb2n("abb") && !anb2n("ab") && anb2n(""));
        assert!(abc_counters("abc") && abc_counters("") && !abc_counters("abcc"));
        assert!(union("aabb") && union("abb") && !union("aab"));
        assert!(union_c("aabb") && union_c("abbc") && !union_c("aabbc"));
        assert!(union_c("c"), "the empty a^n b^2n prefix admits the bare marker");
        assert!(!union_c("cc"));
        assert!(ijk("aab") && ijk("abbc") && !ijk("abc") && !ijk("ba"));
        assert!(!ijk("") && ijk("a"));
    }

    #[test]
    fn l_bab_requires_matched_repetitions() {
        assert!(l_bab("bab"));
        assert!(l_bab("babab"));
        assert!(l_bab("bbaabbaabb"));
        assert!(!l_bab(""));
        assert!(!l_bab("b"));
        assert!(!l_bab("ab"));
        assert!(!l_bab("bba"));
        assert!(!l_bab("baab"));
    }

    #[test]
    fn mpal_checks_marked_reversal() {
        assert!(mpal(2, "#"));
        assert!(mpal(2, "10#01"));
        assert!(!mpal(2, "10#10"));
        assert!(!mpal(2, "10"));
        assert!(!mpal(2, "1##1"));
        assert!(mpal(3, "123#321"));
        assert!(!mpal(2, "12#21"));
    }

    #[test]
    fn subsetsum_oracle_examples() {
        assert!(subsetsum_r("1#1#"));
        assert!(subsetsum_r("0#0#"));
        assert!(subsetsum_r("101#1#001#"));
        assert!(subsetsum_r("11#1#01#"));
        assert!(!subsetsum_r("11#1#1#"));
        assert!(!subsetsum_r("1#"));
        assert!(!subsetsum_r("#1#"));
        assert!(!subsetsum_r("1##"));
        assert!(!subsetsum_r("1#1"));
        assert!(!subsetsum_r(""));
        // Non-canonical encodings still work by value: "10" is the value 1.
        assert!(subsetsum_r("1#10#"));
    }

    #[test]
    fn word_problem_oracles() {
        assert!(wp_f2(""));
        assert!(wp_f2("aA"));
        assert!(wp_f2("abBA"));
        assert!(!wp_f2("ab"));
        assert!(!wp_f2("aa"));
        assert!(wp_f2xf2(""));
        assert!(wp_f2xf2("abAB"));
        assert!(!wp_f2xf2("ab"));
        assert!(wp_f2xf2("aAbB"));
        assert!(!wp_f2("xy"));
    }

    #[test]
    fn lsb_encoding_is_canonical() {
        assert_eq!(lsb_encoding(0), "0");
        assert_eq!(lsb_encoding(1), "1");
        assert_eq!(lsb_encoding(2), "01");
        assert_eq!(lsb_encoding(6), "011");
        assert_eq!(lsb_encoding(15), "1111");
        for v in 0..64 {
            let enc = lsb_encoding(v);
            assert_eq!(lsb_value(&enc), Some(u128::from(v)));
            assert!(enc == "0" || enc.ends_with('1'), "no trailing zero bits");
        }
    }

    #[test]
    fn instance_generator_counts() {
        let instances = subsetsum_instances(15, 3);
        assert_eq!(instances.len(), 16 * (16 + 16 * 16 + 16 * 16 * 16));
        assert!(instances.iter().all(|s| s.ends_with('#')));
        assert!(instances.contains(&"1#1#".to_owned()));
        assert!(instances.contains(&"1111#01#11#001#".to_owned()));
    }

    #[test]
    fn string_generators() {
        assert_eq!(strings_over(&['a', 'b'], 2).len(), 7);
        assert_eq!(unary_strings('a', 3), vec!["", "a", "aa", "aaa"]);
        let blocks = ab_blocks(3);
        assert!(blocks.contains(&"aab".to_owned()));
        assert_eq!(blocks.len(), 4 + 3 + 2 + 1);
    }
}
