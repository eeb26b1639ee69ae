use std::collections::BTreeMap;

use super::PromptError;

/// Gerunds for every verb of the 80-class AVA vocabulary, plus whole-phrase
/// renderings for the classes that do not start with a verb.
pub const AVA_GERUNDS: &[(&str, &str)] = &[
    // whole phrases
    ("fishing", "fishing"),
    ("hand clap", "clapping hands"),
    ("hand shake", "shaking hands"),
    ("hand wave", "waving a hand"),
    ("martial art", "doing martial arts"),
    (
        "text on/look at a cellphone",
        "texting on/looking at a cellphone",
    ),
    // verbs
    ("answer", "answering"),
    ("bend", "bending"),
    ("bow", "bowing"),
    ("brush", "brushing"),
    ("carry", "carrying"),
    ("catch", "catching"),
    ("chop", "chopping"),
    ("climb", "climbing"),
    ("clink", "clinking"),
    ("close", "closing"),
    ("cook", "cooking"),
    ("crawl", "crawling"),
    ("crouch", "crouching"),
    ("cut", "cutting"),
    ("dance", "dancing"),
    ("dig", "digging"),
    ("dress", "dressing"),
    ("drink", "drinking"),
    ("drive", "driving"),
    ("eat", "eating"),
    ("enter", "entering"),
    ("exit", "exiting"),
    ("extract", "extracting"),
    ("fall", "falling"),
    ("fight", "fighting"),
    ("get", "getting"),
    ("give", "giving"),
    ("grab", "grabbing"),
    ("hit", "hitting"),
    ("hold", "holding"),
    ("hug", "hugging"),
    ("jog", "jogging"),
    ("jump", "jumping"),
    ("kick", "kicking"),
    ("kiss", "kissing"),
    ("kneel", "kneeling"),
    ("leap", "leaping"),
    ("lie", "lying"),
    ("lift", "lifting"),
    ("listen", "listening"),
    ("look", "looking"),
    ("open", "opening"),
    ("paint", "painting"),
    ("pick", "picking"),
    ("play", "playing"),
    ("point", "pointing"),
    ("press", "pressing"),
    ("pull", "pulling"),
    ("push", "pushing"),
    ("put", "putting"),
    ("read", "reading"),
    ("ride", "riding"),
    ("row", "rowing"),
    ("run", "running"),
    ("sail", "sailing"),
    ("serve", "serving"),
    ("shoot", "shooting"),
    ("shovel", "shoveling"),
    ("sing", "singing"),
    ("sit", "sitting"),
    ("sleep", "sleeping"),
    ("smoke", "smoking"),
    ("stand", "standing"),
    ("stir", "stirring"),
    ("swim", "swimming"),
    ("take", "taking"),
    ("talk", "talking"),
    ("throw", "throwing"),
    ("touch", "touching"),
    ("turn", "turning"),
    ("walk", "walking"),
    ("watch", "watching"),
    ("work", "working"),
    ("write", "writing"),
];

pub fn ava_gerund_table() -> BTreeMap<String, String> {
    AVA_GERUNDS
        .iter()
        .map(|&(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

/// Rule-based gerund of a single lowercase word.
fn rule_gerund(word: &str) -> String {
    let b = word.as_bytes();
    let n = b.len();
    if !b.iter().all(u8::is_ascii_lowercase) || n < 2 {
        return format!("{word}ing");
    }
    if word.ends_with("ie") {
        return format!("{}ying", &word[..n - 2]);
    }
    if b[n - 1] == b'e' && !is_vowel(b[n - 2]) && n > 2 {
        return format!("{}ing", &word[..n - 1]);
    }
    let vowel_groups = b
        .iter()
        .enumerate()
        .filter(|&(i, &c)| is_vowel(c) && (i == 0 || !is_vowel(b[i - 1])))
        .count();
    let cvc = n >= 3
        && !is_vowel(b[n - 3])
        && is_vowel(b[n - 2])
        && !is_vowel(b[n - 1])
        && !matches!(b[n - 1], b'w' | b'x' | b'y');
    if vowel_groups == 1 && cvc {
        return format!("{word}{}ing", b[n - 1] as char);
    }
    format!("{word}ing")
}

fn gerund_word(word: &str, overrides: &BTreeMap<String, String>) -> String {
    match overrides.get(word) {
        Some(g) => g.clone(),
        None => rule_gerund(word),
    }
}

/// Puts the leading verb of an action phrase into its `-ing` form.
///
/// The first whitespace-separated token is the verb; the rest of the phrase
/// is carried through unchanged. Slash alternatives in the verb token are
/// each converted (`run/jog` → `running/jogging`). `overrides` is consulted
/// for the whole phrase first, then for each verb, before the spelling rules.
pub fn gerundize(
    phrase: &str,
    overrides: &BTreeMap<String, String>,
) -> Result<String, PromptError> {
    let phrase = phrase.trim();
    if phrase.is_empty() {
        return Err(PromptError::EmptyPhrase);
    }
    if let Some(g) = overrides.get(phrase) {
        return Ok(g.clone());
    }
    let (verb, rest) = match phrase.split_once(char::is_whitespace) {
        Some((v, r)) => (v, Some(r)),
        None => (phrase, None),
    };
    let converted = verb
        .split('/')
        .map(|w| gerund_word(w, overrides))
        .collect::<Vec<_>>()
        .join("/");
    Ok(match rest {
        Some(r) => format!("{converted} {r}"),
        None => converted,
    })
}
