//! JSON documents for structures, towers and search results. Field order is fixed so output
//! is byte-for-byte reproducible.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::beauville::{BeauvilleStructure, SearchMode, SearchOutcome, Triple};
use crate::error::{Error, Result};
use crate::group::{Group, GroupDescription};
use crate::lifting::Tower;

pub fn triple_to_json(group: &Group, t: &Triple) -> Value {
    Value::Array(
        t.elements()
            .iter()
            .map(|&e| group.element_to_json(e))
            .collect(),
    )
}

pub fn triple_from_json(group: &Group, v: &Value) -> Result<Triple> {
    let items = v
        .as_array()
        .filter(|a| a.len() == 3)
        .ok_or_else(|| Error::Json(format!("a triple is a list of three elements, got {v}")))?;
    Ok(Triple::new(
        group.element_from_json(&items[0])?,
        group.element_from_json(&items[1])?,
        group.element_from_json(&items[2])?,
    ))
}

pub fn structure_to_json(s: &BeauvilleStructure) -> Value {
    let g = &s.group;
    let refutation = s.refutation.as_ref().map(|r| {
        json!({
            "condition": r.condition.number(),
            "triple": r.triple,
            "witness": r.witness.map(|w| g.element_to_json(w)),
            "reason": r.reason,
        })
    });
    json!({
        "group": g.spec(),
        "t1": triple_to_json(g, &s.first),
        "t2": triple_to_json(g, &s.second),
        "signature": s.signature.entries(),
        "balanced": s.signature.is_balanced(),
        "verified": s.verified,
        "refutation": refutation,
    })
}

/// Reads `group`, `t1` and `t2` from a structure document. Other fields are ignored; callers
/// re-verify rather than trusting a stored verdict.
pub fn structure_from_json(v: &Value) -> Result<(Arc<Group>, Triple, Triple)> {
    let spec = v
        .get("group")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Json("structure document needs a \"group\" string".into()))?;
    let group = Arc::new(Group::new(spec.parse::<GroupDescription>()?)?);
    let field = |k: &str| {
        v.get(k)
            .ok_or_else(|| Error::Json(format!("structure document needs \"{k}\"")))
    };
    let t1 = triple_from_json(&group, field("t1")?)?;
    let t2 = triple_from_json(&group, field("t2")?)?;
    Ok((group, t1, t2))
}

pub fn tower_to_json(t: &Tower) -> Value {
    json!({
        "p": t.p,
        "lambda_rule": t.rule.to_string(),
        "levels": t.structures.iter().map(structure_to_json).collect::<Vec<_>>(),
        "compatible": t.compatible,
    })
}

/// Search result without timing, so identical runs print identical documents.
pub fn search_to_json(group: &Group, out: &SearchOutcome) -> Value {
    json!({
        "group": group.spec(),
        "order": group.order(),
        "mode": match out.mode {
            SearchMode::Exhaustive => "exhaustive",
            SearchMode::FirstFound => "first-found",
        },
        "exists": out.exists(),
        "count": out.count,
        "exhaustive": out.exhaustive,
        "generating_triples": out.generating_triples,
        "first": out.first.as_ref().map(structure_to_json),
        "structures": out.structures.iter().map(structure_to_json).collect::<Vec<_>>(),
        "stop_reason": out.stop_reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beauville::{search, verify, SearchOptions};

    #[test]
    fn structure_round_trip() {
        let g = Arc::new(Group::new(GroupDescription::metacyclic(5, 1, 1, 1)).unwrap());
        let s = search(&g, &SearchOptions::first_found())
            .unwrap()
            .first
            .unwrap();
        let v = structure_to_json(&s);
        assert_eq!(v["group"], "metacyclic:p=5,m=1,n=1,lambda=1");
        assert_eq!(v["signature"], json!([5, 5, 5, 5, 5, 5]));
        assert_eq!(v["refutation"], Value::Null);
        let (g2, t1, t2) = structure_from_json(&v).unwrap();
        assert_eq!(verify(&g2, t1, t2).unwrap(), s);
    }

    #[test]
    fn refutation_is_serialized() {
        let g = Arc::new(Group::new(GroupDescription::metacyclic(5, 1, 1, 1)).unwrap());
        let t = Triple::completing(
            &g,
            g.metacyclic().unwrap().element(1, 0),
            g.metacyclic().unwrap().element(0, 1),
        );
        let v = structure_to_json(&verify(&g, t, t).unwrap());
        assert_eq!(v["refutation"]["condition"], 3);
        assert_eq!(v["refutation"]["witness"], json!([1, 0]));
        assert_eq!(v["verified"], false);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        for bad in [
            json!({}),
            json!({"group": "metacyclic:p=5,m=1,n=1,lambda=1", "t1": [[0, 1]], "t2": []}),
            json!({"group": "nonsense", "t1": [], "t2": []}),
        ] {
            assert!(structure_from_json(&bad).is_err());
        }
    }
}
