//! JSON interchange. Rationals are written as `"p/q"` strings.
//!
//! A graph is `{"num_darts", "sigma0", "allow_tails", "hole_marking",
//! "vertex_marking", "lengths"?}` with darts `2k` and `2k+1` forming edge `k`
//! and holes the cycles of `σ∞ = σ₁ ∘ σ₀⁻¹`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chain::{FaceKind, OrientedCellChain, WittenCertificate};
use crate::enriched::{EnrichedRibbonGraph, InvisibleVertex, NodeEnd};
use crate::error::{Result, RibbonError};
use crate::metric::MetricRibbonGraph;
use crate::ribbon::{Markings, RibbonGraph};
use crate::scalar::ExactField;
use crate::volume::VolumeReport;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub num_darts: usize,
    pub sigma0: Vec<usize>,
    #[serde(default)]
    pub allow_tails: bool,
    #[serde(default)]
    pub hole_marking: BTreeMap<String, usize>,
    #[serde(default)]
    pub vertex_marking: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<String>>,
}

impl GraphJson {
    pub fn from_graph(g: &RibbonGraph) -> Self {
        GraphJson {
            num_darts: g.num_darts(),
            sigma0: g.sigma0_array().to_vec(),
            allow_tails: g.allow_tails(),
            hole_marking: g.hole_marking().clone(),
            vertex_marking: g.vertex_marking().clone(),
            lengths: None,
        }
    }

    pub fn from_metric<T: ExactField>(g: &MetricRibbonGraph<T>) -> Self {
        let mut j = Self::from_graph(g.graph());
        j.lengths = Some(g.lengths().iter().map(|l| l.to_exact_string()).collect());
        j
    }

    pub fn to_graph(&self) -> Result<RibbonGraph> {
        let markings = Markings { holes: self.hole_marking.clone(), vertices: self.vertex_marking.clone() };
        RibbonGraph::new(self.num_darts, self.sigma0.clone(), markings, self.allow_tails)
    }

    /// The metric graph; unit lengths when none are given.
    pub fn to_metric<T: ExactField>(&self) -> Result<MetricRibbonGraph<T>> {
        let g = self.to_graph()?;
        match &self.lengths {
            None => Ok(MetricRibbonGraph::unit(g)),
            Some(ls) => {
                let lengths = ls
                    .iter()
                    .map(|s| T::parse_exact(s).ok_or_else(|| RibbonError::BadRational(s.clone())))
                    .collect::<Result<Vec<T>>>()?;
                MetricRibbonGraph::new(g, lengths)
            }
        }
    }
}

pub fn graph_to_json(g: &RibbonGraph) -> Value {
    serde_json::to_value(GraphJson::from_graph(g)).expect("serializable")
}

pub fn metric_to_json<T: ExactField>(g: &MetricRibbonGraph<T>) -> Value {
    serde_json::to_value(GraphJson::from_metric(g)).expect("serializable")
}

pub fn graph_from_json(v: &Value) -> Result<RibbonGraph> {
    parse_graph_json(v)?.to_graph()
}

pub fn metric_from_json<T: ExactField>(v: &Value) -> Result<MetricRibbonGraph<T>> {
    parse_graph_json(v)?.to_metric()
}

fn parse_graph_json(v: &Value) -> Result<GraphJson> {
    serde_json::from_value(v.clone()).map_err(|e| RibbonError::Json(e.to_string()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum EndJson {
    Visible(usize),
    Invisible(usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct InvisibleJson {
    genus: u32,
    #[serde(default)]
    labels: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct EnrichedJson {
    visible: GraphJson,
    #[serde(default)]
    invisible: Vec<InvisibleJson>,
    #[serde(default)]
    zeta: Vec<(EndJson, EndJson)>,
}

fn end_to_json(e: NodeEnd) -> EndJson {
    match e {
        NodeEnd::Visible(d) => EndJson::Visible(d),
        NodeEnd::Invisible(i) => EndJson::Invisible(i),
    }
}

fn end_from_json(e: &EndJson) -> NodeEnd {
    match *e {
        EndJson::Visible(d) => NodeEnd::Visible(d),
        EndJson::Invisible(i) => NodeEnd::Invisible(i),
    }
}

/// `{"visible": graph, "invisible": [{"genus", "labels"}], "zeta": [[end, end]]}`
/// with ends `{"visible": dart}` or `{"invisible": index}`.
pub fn enriched_to_json(g: &EnrichedRibbonGraph) -> Value {
    let e = EnrichedJson {
        visible: GraphJson::from_graph(g.visible()),
        invisible: g
            .invisible()
            .iter()
            .map(|w| InvisibleJson { genus: w.genus, labels: w.labels.iter().cloned().collect() })
            .collect(),
        zeta: g.zeta().iter().map(|&(a, b)| (end_to_json(a), end_to_json(b))).collect(),
    };
    serde_json::to_value(e).expect("serializable")
}

pub fn enriched_from_json(v: &Value) -> Result<EnrichedRibbonGraph> {
    let e: EnrichedJson = serde_json::from_value(v.clone()).map_err(|e| RibbonError::Json(e.to_string()))?;
    let visible = e.visible.to_graph()?;
    let invisible =
        e.invisible.iter().map(|w| InvisibleVertex { genus: w.genus, labels: w.labels.iter().cloned().collect() }).collect();
    let zeta = e.zeta.iter().map(|(a, b)| (end_from_json(a), end_from_json(b))).collect();
    EnrichedRibbonGraph::new(visible, invisible, zeta)
}

/// One line per term: `{"canonical_code", "sign", "coefficient"}`.
pub fn chain_to_jsonl<T: ExactField>(chain: &OrientedCellChain<T>) -> String {
    let mut out = String::new();
    for (code, t) in chain.terms() {
        let line = json!({
            "canonical_code": code.to_key(),
            "sign": t.orientation,
            "coefficient": t.coefficient.to_exact_string(),
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}

fn rationals<T: ExactField>(xs: &[T]) -> Vec<String> {
    xs.iter().map(|x| x.to_exact_string()).collect()
}

fn kind_json(k: &FaceKind) -> Value {
    match *k {
        FaceKind::Merge { t1, t2 } => json!({"type": "merge", "t1": t1, "t2": t2}),
        FaceKind::Node { even, odd } => json!({"type": "node", "even_side": even, "odd_side": odd}),
        FaceKind::Other => json!({"type": "other"}),
    }
}

pub fn witten_certificate_to_json<T: ExactField>(c: &WittenCertificate<T>) -> Value {
    let faces: Vec<Value> = c
        .faces
        .iter()
        .map(|f| {
            json!({
                "face": f.face,
                "kind": kind_json(&f.kind),
                "aut_order": f.aut_order,
                "orientation_reversing": f.orientation_reversing,
                "net": f.net.to_exact_string(),
                "cofaces": f.cofaces.to_exact_string(),
                "expected_cofaces": f.expected_cofaces,
                "contributions": f.contributions.iter().map(|x| json!({
                    "cell": x.cell,
                    "edge": x.edge,
                    "sign": x.sign,
                    "weight": x.weight.to_exact_string(),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "genus": c.genus,
        "holes": c.holes,
        "profile": c.profile.counts(),
        "perimeters": rationals(&c.perimeters),
        "num_cells": c.num_cells,
        "num_faces": c.faces.len(),
        "is_cycle": c.is_cycle,
        "coface_counts_match": c.coface_counts_match(),
        "faces": faces,
    })
}

pub fn volume_report_to_json<T: ExactField>(r: &VolumeReport<T>) -> Value {
    let norm = match r.eta_normalization {
        crate::forms::EtaNormalization::HalfPerimeter => "l/(2p)",
        crate::forms::EtaNormalization::Perimeter => "l/p",
    };
    json!({
        "genus": r.genus,
        "holes": r.holes,
        "degree": r.degree,
        "perimeters": rationals(&r.perimeters),
        "side_coordinate": norm,
        "omega_b_constant": r.omega_b_constant,
        "raw": r.raw.to_exact_string(),
        "normalization_factor": r.normalization_factor.to_exact_string(),
        "volume": r.normalized.to_exact_string(),
        "cells": r.cells.iter().map(|c| json!({
            "canonical_code": c.code.to_key(),
            "aut_order": c.code.aut_order,
            "pfaffian": c.pfaffian.to_exact_string(),
            "polytope_volume": c.polytope_volume.to_exact_string(),
            "contribution": c.contribution.to_exact_string(),
        })).collect::<Vec<_>>(),
    })
}
