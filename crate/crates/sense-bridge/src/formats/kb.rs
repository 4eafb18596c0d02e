use std::collections::BTreeMap;
use std::fmt::Write as _;

use sense_bridge_core::kb::{
    AtomSkeleton, Concept, Frame, KbBuilder, KnowledgeBase, Lexeme, PartOfSpeech, PredicateDef, Role, SenseTemplate,
    SlotArg,
};
use sense_bridge_core::sexpr::{quote, Sexp};

use super::{head, integer, read_forms, string, symbol, syntax, FormatError, Keywords};

/// Parse and validate a knowledge-base document.
pub fn parse_kb(src: &str) -> Result<KnowledgeBase, FormatError> {
    Ok(builder(src)?.build()?)
}

/// Parse without validating, so the findings can be reported instead.
pub fn parse_kb_unchecked(src: &str) -> Result<KnowledgeBase, FormatError> {
    Ok(builder(src)?.build_unchecked())
}

fn builder(src: &str) -> Result<KbBuilder, FormatError> {
    let mut b = KnowledgeBase::builder();
    for form in read_forms(src)? {
        let (name, rest) = head(&form)?;
        let at = form.pos();
        b.at_line(at.line);
        match name {
            "concept" => {
                let id = symbol(rest.first(), at, "concept id")?;
                let kw = Keywords::parse(&rest[1..], at, &["gloss", "parents"])?;
                let gloss = string(Some(kw.require("gloss")?), at, ":gloss")?;
                let parents = kw
                    .list("parents")?
                    .unwrap_or_default()
                    .iter()
                    .map(|p| symbol(Some(p), at, "parent id").map(String::from))
                    .collect::<Result<_, _>>()?;
                b.concept(Concept { id: id.into(), gloss: gloss.into(), parents })?;
            }
            "predicate" => {
                let name = symbol(rest.first(), at, "predicate name")?;
                let kw = Keywords::parse(&rest[1..], at, &["arity", "template"])?;
                let arity = integer(Some(kw.require("arity")?), at, ":arity")?;
                let template = kw.get("template").map(|t| string(Some(t), at, ":template")).transpose()?;
                b.predicate(PredicateDef { name: name.into(), arity, template: template.map(String::from) })?;
            }
            "frame" => {
                let id = symbol(rest.first(), at, "frame id")?;
                let kw = Keywords::parse(&rest[1..], at, &["desc"])?;
                let desc = kw.get("desc").map(|d| string(Some(d), at, ":desc")).transpose()?.unwrap_or_default();
                b.frame(Frame { id: id.into(), description: desc.into() })?;
            }
            "lexeme" => {
                let lemma = symbol(rest.first(), at, "lemma")?;
                let kw = Keywords::parse(&rest[1..], at, &["past", "surface"])?;
                let mut lexeme = Lexeme::new(lemma);
                lexeme.past = kw.get("past").map(|p| string(Some(p), at, ":past")).transpose()?.map(String::from);
                lexeme.surface =
                    kw.get("surface").map(|s| string(Some(s), at, ":surface")).transpose()?.map(String::from);
                b.lexeme(lexeme)?;
            }
            "entity" => {
                let lemma = symbol(rest.first(), at, "lemma")?;
                let concept = symbol(rest.get(1), at, "entity type")?;
                if rest.len() > 2 {
                    return Err(syntax(rest[2].pos(), "unexpected item after entity type"));
                }
                b.entity(lemma, concept)?;
            }
            "sense" => {
                b.sense(sense(rest, at)?)?;
            }
            other => return Err(syntax(at, format!("unknown record '{other}'"))),
        }
    }
    Ok(b)
}

fn sense(rest: &[Sexp], at: sense_bridge_core::sexpr::Pos) -> Result<SenseTemplate, FormatError> {
    let sense_id = symbol(rest.first(), at, "sense id")?;
    let kw = Keywords::parse(&rest[1..], at, &["lemma", "pos", "concept", "frame", "atoms", "constraints"])?;
    let lemma = symbol(Some(kw.require("lemma")?), at, ":lemma")?;
    let pos_item = kw.require("pos")?;
    let pos: PartOfSpeech =
        symbol(Some(pos_item), at, ":pos")?.parse().map_err(|_| syntax(pos_item.pos(), ":pos must be verb or noun"))?;
    let head_concept = symbol(Some(kw.require("concept")?), at, ":concept")?;
    let frame = kw.get("frame").map(|f| symbol(Some(f), at, ":frame")).transpose()?;
    let atoms_item = kw.require("atoms")?;
    let atoms = atoms_item
        .as_list()
        .ok_or_else(|| syntax(atoms_item.pos(), ":atoms must be a list"))?
        .iter()
        .map(atom_skeleton)
        .collect::<Result<Vec<_>, _>>()?;
    let mut role_constraints = BTreeMap::new();
    for c in kw.list("constraints")?.unwrap_or_default() {
        let pair =
            c.as_list().filter(|p| p.len() == 2).ok_or_else(|| syntax(c.pos(), "constraint must be (ROLE Concept)"))?;
        let role_sym = symbol(pair.first(), c.pos(), "role")?;
        let role =
            Role::from_symbol(role_sym).ok_or_else(|| syntax(pair[0].pos(), format!("unknown role '{role_sym}'")))?;
        let concept = symbol(pair.get(1), c.pos(), "constraint concept")?;
        if role_constraints.insert(role, concept.to_string()).is_some() {
            return Err(syntax(c.pos(), format!("role {role} constrained twice")));
        }
    }
    Ok(SenseTemplate {
        sense_id: sense_id.into(),
        lemma: lemma.into(),
        pos,
        head_concept: head_concept.into(),
        frame: frame.map(String::from),
        atoms,
        role_constraints,
    })
}

fn atom_skeleton(form: &Sexp) -> Result<AtomSkeleton, FormatError> {
    let items = form.as_list().ok_or_else(|| syntax(form.pos(), "atom skeleton must be a list"))?;
    let predicate = symbol(items.first(), form.pos(), "atom predicate")?;
    let args = items[1..]
        .iter()
        .map(|a| {
            let s = symbol(Some(a), form.pos(), "atom argument")?;
            Ok(match s.strip_prefix("CONST:") {
                Some(c) => SlotArg::Const(c.into()),
                None => SlotArg::from_symbol(s),
            })
        })
        .collect::<Result<_, FormatError>>()?;
    Ok(AtomSkeleton { predicate: predicate.into(), args })
}

/// Canonical text of a knowledge base: items of each kind sorted by id,
/// senses grouped by (lemma, pos) and kept in declaration order within a
/// group. Loading the dump gives back the same dump.
pub fn dump_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    let mut concepts: Vec<_> = kb.concepts().iter().collect();
    concepts.sort_by(|a, b| a.id.cmp(&b.id));
    for c in concepts {
        let parents = c.parents.join(" ");
        let _ = writeln!(out, "(concept {} :gloss {} :parents ({parents}))", c.id, quote(&c.gloss));
    }
    let mut preds: Vec<_> = kb.predicates().iter().collect();
    preds.sort_by(|a, b| a.name.cmp(&b.name));
    for p in preds {
        let _ = write!(out, "(predicate {} :arity {}", p.name, p.arity);
        if let Some(t) = &p.template {
            let _ = write!(out, " :template {}", quote(t));
        }
        out.push_str(")\n");
    }
    let mut frames: Vec<_> = kb.frames().iter().collect();
    frames.sort_by(|a, b| a.id.cmp(&b.id));
    for f in frames {
        let _ = writeln!(out, "(frame {} :desc {})", f.id, quote(&f.description));
    }
    let mut lexemes: Vec<_> = kb.lexemes().iter().collect();
    lexemes.sort_by(|a, b| a.lemma.cmp(&b.lemma));
    for l in lexemes {
        let _ = write!(out, "(lexeme {}", l.lemma);
        if let Some(p) = &l.past {
            let _ = write!(out, " :past {}", quote(p));
        }
        if let Some(s) = &l.surface {
            let _ = write!(out, " :surface {}", quote(s));
        }
        out.push_str(")\n");
    }
    let mut entities: Vec<_> = kb.entities().iter().collect();
    entities.sort();
    for (lemma, concept) in entities {
        let _ = writeln!(out, "(entity {lemma} {concept})");
    }
    let mut groups: BTreeMap<(&str, PartOfSpeech), Vec<&SenseTemplate>> = BTreeMap::new();
    for s in kb.senses() {
        groups.entry((s.lemma.as_str(), s.pos)).or_default().push(s);
    }
    for s in groups.into_values().flatten() {
        let _ = write!(out, "(sense {} :lemma {} :pos {} :concept {}", s.sense_id, s.lemma, s.pos, s.head_concept);
        if let Some(f) = &s.frame {
            let _ = write!(out, " :frame {f}");
        }
        let atoms: Vec<String> = s
            .atoms
            .iter()
            .map(|a| {
                let mut parts = vec![a.predicate.clone()];
                parts.extend(a.args.iter().map(|x| match x {
                    SlotArg::Const(c) if Role::from_symbol(c).is_some() => format!("CONST:{c}"),
                    other => other.to_string(),
                }));
                format!("({})", parts.join(" "))
            })
            .collect();
        let _ = write!(out, " :atoms ({})", atoms.join(" "));
        if !s.role_constraints.is_empty() {
            let cs: Vec<String> = s.role_constraints.iter().map(|(r, c)| format!("({r} {c})")).collect();
            let _ = write!(out, " :constraints ({})", cs.join(" "));
        }
        out.push_str(")\n");
    }
    out
}
