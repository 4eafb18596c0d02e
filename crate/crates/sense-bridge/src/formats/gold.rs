use std::collections::BTreeSet;

use sense_bridge_core::eval::{ErrorCategory, FramePrediction, GoldAnnotation};

use super::{head, integer, read_forms, string, symbol, syntax, FormatError, Keywords};

pub fn parse_gold(src: &str) -> Result<Vec<GoldAnnotation>, FormatError> {
    let mut out = Vec::new();
    let mut keys = BTreeSet::new();
    for form in read_forms(src)? {
        let (name, rest) = head(&form)?;
        let at = form.pos();
        if name != "gold" {
            return Err(syntax(at, format!("unknown record '{name}'")));
        }
        let sentence_id = string(rest.first(), at, "sentence id")?;
        let token_index: usize = integer(rest.get(1), at, "token index")?;
        if !keys.insert((sentence_id.to_string(), token_index)) {
            return Err(syntax(at, format!("duplicate gold item (\"{sentence_id}\" {token_index})")));
        }
        let kw = Keywords::parse(rest.get(2..).unwrap_or_default(), at, &["sense", "frame", "category"])?;
        let sense = symbol(Some(kw.require("sense")?), at, ":sense")?;
        let frame = kw.get("frame").map(|f| symbol(Some(f), at, ":frame")).transpose()?;
        let error_category = match kw.get("category") {
            None => None,
            Some(c) => {
                let label = symbol(Some(c), at, ":category")?;
                Some(label.parse::<ErrorCategory>().map_err(|e| syntax(c.pos(), e))?)
            }
        };
        out.push(GoldAnnotation {
            sentence_id: sentence_id.into(),
            token_index,
            gold_sense_id: sense.into(),
            gold_frame: frame.map(String::from),
            error_category,
        });
    }
    Ok(out)
}

/// `(frame-pred "<sentence_id>" <token_index> <FN_Id|none>)` records.
pub fn parse_frame_predictions(src: &str) -> Result<Vec<FramePrediction>, FormatError> {
    let mut out = Vec::new();
    let mut keys = BTreeSet::new();
    for form in read_forms(src)? {
        let (name, rest) = head(&form)?;
        let at = form.pos();
        if name != "frame-pred" {
            return Err(syntax(at, format!("unknown record '{name}'")));
        }
        let sentence_id = string(rest.first(), at, "sentence id")?;
        let token_index: usize = integer(rest.get(1), at, "token index")?;
        let frame = symbol(rest.get(2), at, "predicted frame")?;
        if rest.len() > 3 {
            return Err(syntax(rest[3].pos(), "unexpected item after predicted frame"));
        }
        if !keys.insert((sentence_id.to_string(), token_index)) {
            return Err(syntax(at, format!("duplicate frame prediction (\"{sentence_id}\" {token_index})")));
        }
        out.push(FramePrediction {
            sentence_id: sentence_id.into(),
            token_index,
            predicted_frame: (frame != "none").then(|| frame.to_string()),
        });
    }
    Ok(out)
}
