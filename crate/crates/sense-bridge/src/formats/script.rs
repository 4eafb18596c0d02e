use sense_bridge_core::oracle::ScriptedOracle;

use super::{head, read_forms, string, symbol, syntax, FormatError};

/// `(reply "<sentence_id>" <word> "<reply>" ...)` records. Retry `k` of a
/// selection receives the `k`-th reply.
pub fn parse_script(src: &str) -> Result<ScriptedOracle, FormatError> {
    let mut oracle = ScriptedOracle::new();
    let mut seen = std::collections::BTreeSet::new();
    for form in read_forms(src)? {
        let (name, rest) = head(&form)?;
        let at = form.pos();
        if name != "reply" {
            return Err(syntax(at, format!("unknown record '{name}'")));
        }
        let sentence_id = string(rest.first(), at, "sentence id")?;
        let word = symbol(rest.get(1), at, "word")?;
        let replies = rest
            .get(2..)
            .unwrap_or_default()
            .iter()
            .map(|r| string(Some(r), at, "reply").map(String::from))
            .collect::<Result<Vec<_>, _>>()?;
        if replies.is_empty() {
            return Err(syntax(at, "reply record needs at least one reply"));
        }
        if !seen.insert((sentence_id.to_string(), word.to_string())) {
            return Err(syntax(at, format!("duplicate script entry (\"{sentence_id}\" {word})")));
        }
        oracle.insert(sentence_id, word, replies);
    }
    Ok(oracle)
}
