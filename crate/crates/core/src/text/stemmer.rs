//! English Snowball (Porter2) stemmer.
//!
//! A direct port of the Snowball `english` program: prelude, region marking,
//! steps 1a to 5, and the two exception tables. Words are processed as
//! `char` vectors so non-ASCII input passes through untouched.

/// Stems a single lowercase word.
pub fn stem(word: &str) -> String {
    if let Some(fixed) = exception1(word) {
        return fixed.to_string();
    }
    let mut w: Vec<char> = word.chars().collect();
    if w.len() < 3 {
        return word.to_string();
    }

    prelude(&mut w);
    let (p1, p2) = mark_regions(&w);

    step_1a(&mut w);
    let as_string: String = w.iter().collect();
    if !is_exception2(&as_string) {
        step_1b(&mut w, p1);
        step_1c(&mut w);
        step_2(&mut w, p1);
        step_3(&mut w, p1, p2);
        step_4(&mut w, p2);
        step_5(&mut w, p1, p2);
    }

    w.iter().map(|&c| if c == 'Y' { 'y' } else { c }).collect()
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

fn is_double(a: char, b: char) -> bool {
    a == b && matches!(a, 'b' | 'd' | 'f' | 'g' | 'm' | 'n' | 'p' | 'r' | 't')
}

fn is_valid_li(c: char) -> bool {
    matches!(c, 'c' | 'd' | 'e' | 'g' | 'h' | 'k' | 'm' | 'n' | 'r' | 't')
}

fn exception1(word: &str) -> Option<&'static str> {
    Some(match word {
        "skis" => "ski",
        "skies" => "sky",
        "dying" => "die",
        "lying" => "lie",
        "tying" => "tie",
        "idly" => "idl",
        "gently" => "gentl",
        "ugly" => "ugli",
        "early" => "earli",
        "only" => "onli",
        "singly" => "singl",
        "sky" => "sky",
        "news" => "news",
        "howe" => "howe",
        "atlas" => "atlas",
        "cosmos" => "cosmos",
        "bias" => "bias",
        "andes" => "andes",
        _ => return None,
    })
}

fn is_exception2(word: &str) -> bool {
    matches!(
        word,
        "inning" | "outing" | "canning" | "herring" | "earring" | "proceed" | "exceed" | "succeed"
    )
}

fn prelude(w: &mut Vec<char>) {
    if w.first() == Some(&'\'') {
        w.remove(0);
    }
    if w.first() == Some(&'y') {
        w[0] = 'Y';
    }
    for i in 1..w.len() {
        if w[i] == 'y' && is_vowel(w[i - 1]) {
            w[i] = 'Y';
        }
    }
}

/// Position just past the first non-vowel that follows a vowel, scanning from `from`.
fn region_start(w: &[char], from: usize) -> usize {
    let mut i = from;
    while i < w.len() && !is_vowel(w[i]) {
        i += 1;
    }
    while i < w.len() && is_vowel(w[i]) {
        i += 1;
    }
    if i < w.len() {
        i + 1
    } else {
        w.len()
    }
}

fn mark_regions(w: &[char]) -> (usize, usize) {
    let p1 = ["gener", "commun", "arsen"]
        .iter()
        .find(|prefix| starts_with(w, prefix))
        .map(|prefix| prefix.len())
        .unwrap_or_else(|| region_start(w, 0));
    let p2 = region_start(w, p1);
    (p1, p2)
}

fn starts_with(w: &[char], prefix: &str) -> bool {
    let p: Vec<char> = prefix.chars().collect();
    w.len() >= p.len() && w[..p.len()] == p[..]
}

fn ends_with(w: &[char], suffix: &str) -> bool {
    let n = suffix.chars().count();
    w.len() >= n && w[w.len() - n..].iter().copied().eq(suffix.chars())
}

/// Longest suffix in `candidates` that `w` ends with.
fn longest_suffix<'a>(w: &[char], candidates: &[&'a str]) -> Option<&'a str> {
    candidates
        .iter()
        .filter(|s| ends_with(w, s))
        .max_by_key(|s| s.chars().count())
        .copied()
}

fn replace_suffix(w: &mut Vec<char>, suffix_len: usize, with: &str) {
    w.truncate(w.len() - suffix_len);
    w.extend(with.chars());
}

fn contains_vowel(w: &[char]) -> bool {
    w.iter().any(|&c| is_vowel(c))
}

/// Short syllable ending at `end` (exclusive).
fn ends_short_syllable(w: &[char], end: usize) -> bool {
    if end >= 3 {
        let (a, b, c) = (w[end - 3], w[end - 2], w[end - 1]);
        if !is_vowel(a) && is_vowel(b) && !is_vowel(c) && !matches!(c, 'w' | 'x' | 'Y') {
            return true;
        }
    }
    end == 2 && is_vowel(w[0]) && !is_vowel(w[1])
}

fn step_1a(w: &mut Vec<char>) {
    if let Some(s) = longest_suffix(w, &["'", "'s", "'s'"]) {
        let n = s.chars().count();
        w.truncate(w.len() - n);
    }
    match longest_suffix(w, &["sses", "ied", "ies", "s", "us", "ss"]) {
        Some("sses") => replace_suffix(w, 4, "ss"),
        Some("ied") | Some("ies") => {
            if w.len() - 3 >= 2 {
                replace_suffix(w, 3, "i");
            } else {
                replace_suffix(w, 3, "ie");
            }
        }
        Some("s") if w.len() >= 2 && contains_vowel(&w[..w.len() - 2]) => {
            w.pop();
        }
        _ => {}
    }
}

fn step_1b(w: &mut Vec<char>, p1: usize) {
    let Some(suffix) = longest_suffix(w, &["eed", "eedly", "ed", "edly", "ing", "ingly"]) else {
        return;
    };
    let n = suffix.len();
    let start = w.len() - n;
    match suffix {
        "eed" | "eedly" => {
            if start >= p1 {
                replace_suffix(w, n, "ee");
            }
        }
        _ => {
            if !contains_vowel(&w[..start]) {
                return;
            }
            w.truncate(start);
            if ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz") {
                w.push('e');
            } else if w.len() >= 2 && is_double(w[w.len() - 2], w[w.len() - 1]) {
                w.pop();
            } else if p1 == w.len() && ends_short_syllable(w, w.len()) {
                w.push('e');
            }
        }
    }
}

fn step_1c(w: &mut [char]) {
    let n = w.len();
    if n >= 3 && matches!(w[n - 1], 'y' | 'Y') && !is_vowel(w[n - 2]) {
        w[n - 1] = 'i';
    }
}

const STEP_2: &[(&str, &str)] = &[
    ("tional", "tion"),
    ("enci", "ence"),
    ("anci", "ance"),
    ("abli", "able"),
    ("entli", "ent"),
    ("izer", "ize"),
    ("ization", "ize"),
    ("ational", "ate"),
    ("ation", "ate"),
    ("ator", "ate"),
    ("alism", "al"),
    ("aliti", "al"),
    ("alli", "al"),
    ("fulness", "ful"),
    ("ousli", "ous"),
    ("ousness", "ous"),
    ("iveness", "ive"),
    ("iviti", "ive"),
    ("biliti", "ble"),
    ("bli", "ble"),
    ("ogi", "og"),
    ("fulli", "ful"),
    ("lessli", "less"),
    ("li", ""),
];

fn longest_rule<'a>(w: &[char], rules: &'a [(&'a str, &'a str)]) -> Option<&'a (&'a str, &'a str)> {
    rules
        .iter()
        .filter(|(s, _)| ends_with(w, s))
        .max_by_key(|(s, _)| s.len())
}

fn step_2(w: &mut Vec<char>, p1: usize) {
    let Some(&(suffix, replacement)) = longest_rule(w, STEP_2) else {
        return;
    };
    let start = w.len() - suffix.len();
    if start < p1 {
        return;
    }
    match suffix {
        "ogi" if start == 0 || w[start - 1] != 'l' => {}
        "li" if start == 0 || !is_valid_li(w[start - 1]) => {}
        _ => replace_suffix(w, suffix.len(), replacement),
    }
}

const STEP_3: &[(&str, &str)] = &[
    ("tional", "tion"),
    ("ational", "ate"),
    ("alize", "al"),
    ("icate", "ic"),
    ("iciti", "ic"),
    ("ical", "ic"),
    ("ful", ""),
    ("ness", ""),
    ("ative", ""),
];

fn step_3(w: &mut Vec<char>, p1: usize, p2: usize) {
    let Some(&(suffix, replacement)) = longest_rule(w, STEP_3) else {
        return;
    };
    let start = w.len() - suffix.len();
    if start < p1 || (suffix == "ative" && start < p2) {
        return;
    }
    replace_suffix(w, suffix.len(), replacement);
}

const STEP_4: &[&str] = &[
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment", "ent", "ism", "ate",
    "iti", "ous", "ive", "ize", "ion",
];

fn step_4(w: &mut Vec<char>, p2: usize) {
    let Some(suffix) = longest_suffix(w, STEP_4) else {
        return;
    };
    let start = w.len() - suffix.len();
    if start < p2 {
        return;
    }
    if suffix == "ion" && (start == 0 || !matches!(w[start - 1], 's' | 't')) {
        return;
    }
    w.truncate(start);
}

fn step_5(w: &mut Vec<char>, p1: usize, p2: usize) {
    let n = w.len();
    match w.last() {
        Some('e') => {
            let start = n - 1;
            if start >= p2 || (start >= p1 && !ends_short_syllable(w, start)) {
                w.pop();
            }
        }
        Some('l') => {
            let start = n - 1;
            if start >= p2 && start > 0 && w[start - 1] == 'l' {
                w.pop();
            }
        }
        _ => {}
    }
}
