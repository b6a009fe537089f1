use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::kernel::config::ROOT_ID;
use crate::kernel::{Config, FlatSpec};

/// An encapsulation scope, drawn as a rectangle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxInfo {
    pub id: String,
    pub name: String,
    pub parent: Option<String>,
}

/// A sequential component, drawn as an ellipse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub name: String,
    #[serde(rename = "box")]
    pub box_id: String,
}

/// A pair of components that have a communication between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub actions: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnimModel {
    pub boxes: Vec<BoxInfo>,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

struct Walk<'a> {
    spec: &'a FlatSpec,
    model: AnimModel,
    alphabets: Vec<BTreeSet<String>>,
}

impl Walk<'_> {
    fn visit(&mut self, c: &Config, id: String, box_id: &str) {
        match c {
            Config::Thread { origin, expr } => {
                let name = origin.clone().unwrap_or_else(|| expr.to_string());
                self.alphabets.push(self.spec.reachable_atoms(expr));
                self.model.nodes.push(Node {
                    id,
                    name,
                    box_id: box_id.to_string(),
                });
            }
            Config::Par(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    self.visit(c, format!("{id}.{i}"), box_id);
                }
            }
            Config::Encaps { name, body, .. } => {
                let bid = format!("b{}", self.model.boxes.len());
                self.model.boxes.push(BoxInfo {
                    id: bid.clone(),
                    name: name.clone().unwrap_or_else(|| bid.clone()),
                    parent: Some(box_id.to_string()),
                });
                self.visit(body, id, &bid);
            }
            Config::Hide(_, b) | Config::Rename(_, b) => self.visit(b, id, box_id),
            Config::Seq(b, _) => self.visit(b, id, box_id),
            Config::Done => {}
        }
    }
}

/// Boxes follow the encapsulation nesting of `cfg`; a top-level
/// encapsulation becomes the root box, otherwise an unnamed root box is
/// added. Every node belongs to exactly one box.
pub fn anim_model(spec: &FlatSpec, cfg: &Config) -> AnimModel {
    let mut w = Walk {
        spec,
        model: AnimModel::default(),
        alphabets: Vec::new(),
    };
    match cfg {
        Config::Encaps { name, body, .. } => {
            w.model.boxes.push(BoxInfo {
                id: "b0".into(),
                name: name.clone().unwrap_or_else(|| "b0".into()),
                parent: None,
            });
            w.visit(body, ROOT_ID.to_string(), "b0");
        }
        other => {
            w.model.boxes.push(BoxInfo {
                id: "b0".into(),
                name: spec.entry.clone().unwrap_or_else(|| "system".into()),
                parent: None,
            });
            w.visit(other, ROOT_ID.to_string(), "b0");
        }
    }
    let n = w.model.nodes.len();
    for i in 0..n {
        for j in i + 1..n {
            let mut actions = BTreeSet::new();
            for e in &spec.comms.entries {
                let (l, r) = (&e.left.name, &e.right.name);
                if (w.alphabets[i].contains(l) && w.alphabets[j].contains(r))
                    || (w.alphabets[i].contains(r) && w.alphabets[j].contains(l))
                {
                    actions.insert(e.result.name.clone());
                }
            }
            if !actions.is_empty() {
                w.model.edges.push(Edge {
                    from: w.model.nodes[i].id.clone(),
                    to: w.model.nodes[j].id.clone(),
                    actions: actions.into_iter().collect(),
                });
            }
        }
    }
    w.model
}
