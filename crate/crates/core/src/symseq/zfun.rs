//! Z-array and matching statistics: longest common prefixes with a pattern.

/// `z[i]` is the length of the longest common prefix of `s` and `s[i..]`,
/// with `z[0] = s.len()` by convention. Linear time.
pub fn z_array(s: &[u8]) -> Vec<usize> {
    let n = s.len();
    let mut z = vec![0usize; n];
    if n == 0 {
        return z;
    }
    z[0] = n;
    let (mut l, mut r) = (0usize, 0usize);
    for i in 1..n {
        if i < r {
            z[i] = z[i - l].min(r - i);
        }
        while i + z[i] < n && s[z[i]] == s[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z
}

/// Matching statistics: `out[i]` is the length of the longest common prefix
/// of `text[i..]` and `pat`, capped by the ends of both slices. Runs in
/// O(|pat| + |text|) using the pattern's own Z-array to extend windows,
/// avoiding any separator symbol.
pub fn matching_stats(pat: &[u8], text: &[u8]) -> Vec<usize> {
    let n = text.len();
    let m = pat.len();
    let mut out = vec![0usize; n];
    if n == 0 || m == 0 {
        return out;
    }
    let z = z_array(pat);
    // (l, r): the match window reaching furthest right so far; text[l..r]
    // equals pat[..r−l].
    let (mut l, mut r) = (0usize, 0usize);
    for i in 0..n {
        if i < r && z[i - l] < r - i {
            // The pattern's self-match ends strictly inside the window, so
            // it transfers to the text verbatim.
            out[i] = z[i - l];
            continue;
        }
        // Start from what the window already guarantees and extend by
        // direct comparison.
        let mut k = if i < r { r - i } else { 0 };
        while i + k < n && k < m && pat[k] == text[i + k] {
            k += 1;
        }
        out[i] = k;
        if i + k > r {
            l = i;
            r = i + k;
        }
    }
    out
}
