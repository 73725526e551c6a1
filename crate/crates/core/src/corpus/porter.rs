//! Porter stemmer, following Martin Porter's reference C implementation
//! (including its `bli -> ble` and `logi -> log` step-2 rules).
//!
//! Input is expected to be lower-case ASCII letters; words of one or two
//! letters are returned unchanged.

struct Word {
    b: Vec<u8>,
}

impl Word {
    fn is_cons(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => i == 0 || !self.is_cons(i - 1),
            _ => true,
        }
    }

    /// Number of VC sequences in `b[..len]`.
    fn measure(&self, len: usize) -> usize {
        let mut i = 0;
        while i < len && self.is_cons(i) {
            i += 1;
        }
        let mut m = 0;
        loop {
            while i < len && !self.is_cons(i) {
                i += 1;
            }
            if i >= len {
                return m;
            }
            while i < len && self.is_cons(i) {
                i += 1;
            }
            m += 1;
            if i >= len {
                return m;
            }
        }
    }

    fn has_vowel(&self, len: usize) -> bool {
        (0..len).any(|i| !self.is_cons(i))
    }

    /// `b[..len]` ends with a double consonant.
    fn double_cons(&self, len: usize) -> bool {
        len >= 2 && self.b[len - 1] == self.b[len - 2] && self.is_cons(len - 1)
    }

    /// `b[..len]` ends consonant-vowel-consonant, the last not w, x or y.
    fn cvc(&self, len: usize) -> bool {
        if len < 3 || !self.is_cons(len - 1) || self.is_cons(len - 2) || !self.is_cons(len - 3) {
            return false;
        }
        !matches!(self.b[len - 1], b'w' | b'x' | b'y')
    }

    fn ends(&self, suffix: &str) -> bool {
        self.b.ends_with(suffix.as_bytes())
    }

    /// Length of the word without `suffix` (caller checked `ends`).
    fn stem_len(&self, suffix: &str) -> usize {
        self.b.len() - suffix.len()
    }

    fn set_suffix(&mut self, stem_len: usize, replacement: &str) {
        self.b.truncate(stem_len);
        self.b.extend_from_slice(replacement.as_bytes());
    }

    /// Tries `rules` in order; the first matching suffix ends the search and
    /// is replaced when the stem's measure exceeds `min_measure`.
    fn replace_first(&mut self, rules: &[(&str, &str)], min_measure: usize) {
        for &(suffix, replacement) in rules {
            if self.ends(suffix) {
                let stem = self.stem_len(suffix);
                if self.measure(stem) > min_measure {
                    self.set_suffix(stem, replacement);
                }
                return;
            }
        }
    }

    fn step1ab(&mut self) {
        if self.ends("s") {
            if self.ends("sses") {
                self.b.truncate(self.b.len() - 2);
            } else if self.ends("ies") {
                let stem = self.stem_len("ies");
                self.set_suffix(stem, "i");
            } else if !self.ends("ss") {
                self.b.pop();
            }
        }
        if self.ends("eed") {
            let stem = self.stem_len("eed");
            if self.measure(stem) > 0 {
                self.b.pop();
            }
            return;
        }
        let stem = if self.ends("ed") {
            self.stem_len("ed")
        } else if self.ends("ing") {
            self.stem_len("ing")
        } else {
            return;
        };
        if !self.has_vowel(stem) {
            return;
        }
        self.b.truncate(stem);
        if self.ends("at") || self.ends("bl") || self.ends("iz") {
            self.b.push(b'e');
        } else if self.double_cons(self.b.len()) {
            if !matches!(self.b[self.b.len() - 1], b'l' | b's' | b'z') {
                self.b.pop();
            }
        } else if self.measure(self.b.len()) == 1 && self.cvc(self.b.len()) {
            self.b.push(b'e');
        }
    }

    fn step1c(&mut self) {
        if self.ends("y") {
            let stem = self.stem_len("y");
            if self.has_vowel(stem) {
                let last = self.b.len() - 1;
                self.b[last] = b'i';
            }
        }
    }

    fn step2(&mut self) {
        const RULES: &[(&str, &str)] = &[
            ("ational", "ate"),
            ("tional", "tion"),
            ("enci", "ence"),
            ("anci", "ance"),
            ("izer", "ize"),
            ("bli", "ble"),
            ("alli", "al"),
            ("entli", "ent"),
            ("eli", "e"),
            ("ousli", "ous"),
            ("ization", "ize"),
            ("ation", "ate"),
            ("ator", "ate"),
            ("alism", "al"),
            ("iveness", "ive"),
            ("fulness", "ful"),
            ("ousness", "ous"),
            ("aliti", "al"),
            ("iviti", "ive"),
            ("biliti", "ble"),
            ("logi", "log"),
        ];
        self.replace_first(RULES, 0);
    }

    fn step3(&mut self) {
        const RULES: &[(&str, &str)] = &[
            ("icate", "ic"),
            ("ative", ""),
            ("alize", "al"),
            ("iciti", "ic"),
            ("ical", "ic"),
            ("ful", ""),
            ("ness", ""),
        ];
        self.replace_first(RULES, 0);
    }

    fn step4(&mut self) {
        const SUFFIXES: &[&str] = &[
            "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment", "ent", "ion", "ou", "ism", "ate",
            "iti", "ous", "ive", "ize",
        ];
        for suffix in SUFFIXES {
            if !self.ends(suffix) {
                continue;
            }
            let stem = self.stem_len(suffix);
            // "ion" only counts after s or t; otherwise keep looking.
            if *suffix == "ion" && (stem == 0 || !matches!(self.b[stem - 1], b's' | b't')) {
                continue;
            }
            if self.measure(stem) > 1 {
                self.b.truncate(stem);
            }
            return;
        }
    }

    fn step5(&mut self) {
        if self.ends("e") {
            let stem = self.stem_len("e");
            let m = self.measure(stem);
            if m > 1 || (m == 1 && !self.cvc(stem)) {
                self.b.pop();
            }
        }
        let len = self.b.len();
        if self.ends("l") && self.double_cons(len) && self.measure(len) > 1 {
            self.b.pop();
        }
    }
}

/// Porter stem of a lower-case ASCII word.
pub fn stem(word: &str) -> String {
    if word.len() <= 2 || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    let mut w = Word { b: word.as_bytes().to_vec() };
    w.step1ab();
    if w.b.len() > 1 {
        w.step1c();
        w.step2();
        w.step3();
        w.step4();
        w.step5();
    }
    String::from_utf8(w.b).expect("ascii in, ascii out")
}

#[cfg(test)]
mod tests {
    use super::stem;

    // Expected stems frozen from a published reference Porter implementation
    // (the C reference semantics).
    const REFERENCE: &[(&str, &str)] = &[
        ("networking", "network"),
        ("databases", "databas"),
        ("caresses", "caress"),
        ("ponies", "poni"),
        ("ties", "ti"),
        ("caress", "caress"),
        ("cats", "cat"),
        ("feed", "feed"),
        ("agreed", "agre"),
        ("plastered", "plaster"),
        ("bled", "bled"),
        ("motoring", "motor"),
        ("sing", "sing"),
        ("conflated", "conflat"),
        ("troubled", "troubl"),
        ("sized", "size"),
        ("hopping", "hop"),
        ("tanned", "tan"),
        ("falling", "fall"),
        ("hissing", "hiss"),
        ("fizzed", "fizz"),
        ("failing", "fail"),
        ("filing", "file"),
        ("happy", "happi"),
        ("sky", "sky"),
        ("relational", "relat"),
        ("conditional", "condit"),
        ("rational", "ration"),
        ("valenci", "valenc"),
        ("hesitanci", "hesit"),
        ("digitizer", "digit"),
        ("conformabli", "conform"),
        ("radicalli", "radic"),
        ("differentli", "differ"),
        ("vileli", "vile"),
        ("analogousli", "analog"),
        ("vietnamization", "vietnam"),
        ("predication", "predic"),
        ("operator", "oper"),
        ("feudalism", "feudal"),
        ("decisiveness", "decis"),
        ("hopefulness", "hope"),
        ("callousness", "callous"),
        ("formaliti", "formal"),
        ("sensitiviti", "sensit"),
        ("sensibiliti", "sensibl"),
        ("triplicate", "triplic"),
        ("formative", "form"),
        ("formalize", "formal"),
        ("electriciti", "electr"),
        ("electrical", "electr"),
        ("hopeful", "hope"),
        ("goodness", "good"),
        ("revival", "reviv"),
        ("allowance", "allow"),
        ("inference", "infer"),
        ("airliner", "airlin"),
        ("gyroscopic", "gyroscop"),
        ("adjustable", "adjust"),
        ("defensible", "defens"),
        ("irritant", "irrit"),
        ("replacement", "replac"),
        ("adjustment", "adjust"),
        ("dependent", "depend"),
        ("adoption", "adopt"),
        ("homologou", "homolog"),
        ("communism", "commun"),
        ("activate", "activ"),
        ("angulariti", "angular"),
        ("homologous", "homolog"),
        ("effective", "effect"),
        ("bowdlerize", "bowdler"),
        ("probate", "probat"),
        ("rate", "rate"),
        ("cease", "ceas"),
        ("controll", "control"),
        ("roll", "roll"),
        ("generalizations", "gener"),
        ("oscillators", "oscil"),
        ("learning", "learn"),
        ("machine", "machin"),
        ("analytics", "analyt"),
        ("security", "secur"),
        ("development", "develop"),
        ("programming", "program"),
        ("marketing", "market"),
        ("mining", "mine"),
        ("visualization", "visual"),
        ("engineering", "engin"),
        ("cybersecurity", "cybersecur"),
        ("archaeology", "archaeolog"),
        ("logi", "logi"),
        ("abli", "abli"),
        ("agreement", "agreement"),
        ("news", "new"),
        ("dying", "dy"),
        ("yes", "ye"),
        ("ys", "ys"),
        ("a", "a"),
        ("as", "as"),
        ("generously", "gener"),
        ("mathematics", "mathemat"),
        ("cryptography", "cryptographi"),
        ("robotics", "robot"),
    ];

    #[test]
    fn matches_reference_vocabulary() {
        for (word, expected) in REFERENCE {
            assert_eq!(stem(word), *expected, "stem({word})");
        }
    }

    #[test]
    fn non_alphabetic_passthrough() {
        assert_eq!(stem("c++"), "c++");
        assert_eq!(stem("c#"), "c#");
        assert_eq!(stem("python3"), "python3");
    }
}
