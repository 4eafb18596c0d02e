use std::collections::{BTreeMap, BTreeSet};

use sense_bridge_core::candgen::{tokenize, AnnotatedSentence, TargetWord};
use sense_bridge_core::kb::{PartOfSpeech, Role};
use sense_bridge_core::sexpr::Sexp;

use super::{head, integer, read_forms, string, symbol, syntax, FormatError, Keywords};

/// Parse a corpus document.
///
/// Besides `:text` and `:targets`, a record may carry `:ids ((lemma n) ...)`
/// to pin the discourse-variable index used for a lemma.
pub fn parse_corpus(src: &str) -> Result<Vec<AnnotatedSentence>, FormatError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for form in read_forms(src)? {
        let (name, rest) = head(&form)?;
        let at = form.pos();
        if name != "sentence" {
            return Err(syntax(at, format!("unknown record '{name}'")));
        }
        let id = string(rest.first(), at, "sentence id")?;
        if !seen.insert(id.to_string()) {
            return Err(syntax(at, format!("duplicate sentence id \"{id}\"")));
        }
        let kw = Keywords::parse(&rest[1..], at, &["text", "targets", "ids"])?;
        let text = string(Some(kw.require("text")?), at, ":text")?;
        let mut sentence = AnnotatedSentence::new(id, text);
        let tokens = tokenize(text);
        for t in kw.list("targets")?.unwrap_or_default() {
            let target = target(t, &tokens)?;
            if let Some(prev) = sentence.targets.last() {
                if prev.token_index >= target.token_index {
                    return Err(syntax(t.pos(), "targets must be in increasing token order"));
                }
            }
            sentence.targets.push(target);
        }
        for pin in kw.list("ids")?.unwrap_or_default() {
            let pair =
                pin.as_list().filter(|p| p.len() == 2).ok_or_else(|| syntax(pin.pos(), "pin must be (lemma n)"))?;
            let lemma = symbol(pair.first(), pin.pos(), "pinned lemma")?;
            let n: u64 = integer(pair.get(1), pin.pos(), "pinned index")?;
            if n == 0 {
                return Err(syntax(pair[1].pos(), "pinned index must be positive"));
            }
            if sentence.pinned_ids.insert(lemma.to_string(), n).is_some() {
                return Err(syntax(pin.pos(), format!("lemma '{lemma}' pinned twice")));
            }
        }
        out.push(sentence);
    }
    Ok(out)
}

fn target(form: &Sexp, tokens: &[String]) -> Result<TargetWord, FormatError> {
    let items = form.as_list().ok_or_else(|| syntax(form.pos(), "target must be a list"))?;
    let at = form.pos();
    let token_index: usize = integer(items.first(), at, "token index")?;
    let lemma = symbol(items.get(1), at, "target lemma")?;
    let pos_item = items.get(2);
    let pos: PartOfSpeech = symbol(pos_item, at, "part of speech")?
        .parse()
        .map_err(|_| syntax(pos_item.map_or(at, Sexp::pos), "part of speech must be verb or noun"))?;
    let kw = Keywords::parse(items.get(3..).unwrap_or_default(), at, &["subj", "obj"])?;
    let mut links = BTreeMap::new();
    for (key, role) in [("subj", Role::Subj), ("obj", Role::Obj)] {
        if let Some(v) = kw.get(key) {
            links.insert(role, symbol(Some(v), at, key)?.to_string());
        }
    }
    let surface = tokens.get(token_index).cloned().ok_or_else(|| {
        syntax(at, format!("token index {token_index} is past the end of the sentence ({} tokens)", tokens.len()))
    })?;
    Ok(TargetWord { token_index, surface, lemma: lemma.into(), pos, links })
}
