use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

/// Reserved id that layers use to reference the network input volume.
pub const INPUT_ID: &str = "input";

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("layer `{id}`: {msg}")]
    Layer { id: String, msg: String },
    #[error("layer `{id}` references unknown input `{input}`")]
    DanglingInput { id: String, input: String },
    #[error("cycle detected through layer `{id}`")]
    CycleDetected { id: String },
    #[error("layers are not listed in topological order: `{id}` is used before it is defined")]
    NotTopological { id: String },
    #[error("network must have exactly one sink layer, found {found:?}")]
    SinkCount { found: Vec<String> },
    #[error("network has no layers")]
    Empty,
    #[error("shape inference failed for layer `{id}`: {msg}")]
    Shape { id: String, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    Conv,
    Act,
    Pool,
    Fc,
    Class,
    Concat,
    EltwiseAdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolKind {
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActKind {
    Relu,
}

fn one() -> (u32, u32) {
    (1, 1)
}
fn zero() -> (u32, u32) {
    (0, 0)
}
fn yes() -> bool {
    true
}
fn fp32_bytes() -> u32 {
    4
}

/// One layer of a network descriptor.
///
/// `kernel`, `stride` and `padding` are `(x, y)` pairs in pixels and default
/// to `(1,1)`, `(1,1)` and `(0,0)`. `bias` only matters for CONV/FC
/// coefficient storage. Elements are FP32; `element_bytes` exists so the
/// assumption is visible in the file format, but only the value 4 is
/// accepted.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    pub id: String,
    pub kind: LayerKind,
    pub inputs: Vec<String>,
    #[serde(default = "one")]
    pub kernel: (u32, u32),
    #[serde(default = "one")]
    pub stride: (u32, u32),
    #[serde(default = "zero")]
    pub padding: (u32, u32),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_channels: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool: Option<PoolKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub act: Option<ActKind>,
    #[serde(default = "yes")]
    pub bias: bool,
    #[serde(default = "fp32_bytes")]
    pub element_bytes: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDescriptor {
    pub name: String,
    pub input_shape: super::Shape3D,
    pub layers: Vec<LayerSpec>,
}

/// Parse a descriptor document and run all structural validation.
///
/// Shape-level checks (negative output dims, eltwise shape mismatches) are
/// performed by [`super::infer_shapes`]; everything that can be decided from
/// the graph alone is rejected here.
pub fn parse_network(text: &str) -> Result<NetworkDescriptor, ModelError> {
    let net: NetworkDescriptor =
        serde_json::from_str(text).map_err(|e| ModelError::Syntax {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
    net.validate()?;
    Ok(net)
}

impl NetworkDescriptor {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("descriptor serializes");
        out.push('\n');
        out
    }

    pub fn layer(&self, id: &str) -> Option<&LayerSpec> {
        self.layers.iter().find(|l| l.id == id)
    }

    /// Structural validation: field domains, reference integrity, single
    /// source/sink, acyclicity and topological listing order.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.layers.is_empty() {
            return Err(ModelError::Empty);
        }
        self.input_shape.validate("input").map_err(|msg| ModelError::Layer {
            id: INPUT_ID.into(),
            msg,
        })?;

        let mut seen: HashSet<&str> = HashSet::new();
        let index: HashMap<&str, usize> = self
            .layers
            .iter()
            .enumerate()
            .map(|(i, l)| (l.id.as_str(), i))
            .collect();

        for layer in &self.layers {
            layer.validate_fields()?;
            if layer.id == INPUT_ID {
                return Err(ModelError::Layer {
                    id: layer.id.clone(),
                    msg: format!("`{INPUT_ID}` is reserved for the input volume"),
                });
            }
            if !seen.insert(layer.id.as_str()) {
                return Err(ModelError::Layer {
                    id: layer.id.clone(),
                    msg: "duplicate layer id".into(),
                });
            }
            for input in &layer.inputs {
                if input == INPUT_ID || seen.contains(input.as_str()) {
                    continue;
                }
                if index.contains_key(input.as_str()) {
                    // Forward reference: either a cycle or a mis-ordered list.
                    if self.has_cycle() {
                        return Err(ModelError::CycleDetected { id: layer.id.clone() });
                    }
                    return Err(ModelError::NotTopological { id: input.clone() });
                }
                return Err(ModelError::DanglingInput {
                    id: layer.id.clone(),
                    input: input.clone(),
                });
            }
        }

        // Exactly one sink: a single layer that nothing else consumes.
        let consumed: HashSet<&str> = self
            .layers
            .iter()
            .flat_map(|l| l.inputs.iter().map(String::as_str))
            .collect();
        let sinks: Vec<String> = self
            .layers
            .iter()
            .filter(|l| !consumed.contains(l.id.as_str()))
            .map(|l| l.id.clone())
            .collect();
        if sinks.len() != 1 {
            return Err(ModelError::SinkCount { found: sinks });
        }
        Ok(())
    }

    fn has_cycle(&self) -> bool {
        // Kahn's algorithm over layer-to-layer edges.
        let index: HashMap<&str, usize> = self
            .layers
            .iter()
            .enumerate()
            .map(|(i, l)| (l.id.as_str(), i))
            .collect();
        let mut indegree = vec![0usize; self.layers.len()];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); self.layers.len()];
        for (i, layer) in self.layers.iter().enumerate() {
            for input in &layer.inputs {
                if let Some(&p) = index.get(input.as_str()) {
                    indegree[i] += 1;
                    children[p].push(i);
                }
            }
        }
        let mut queue: VecDeque<usize> = indegree
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(i, _)| i)
            .collect();
        let mut visited = 0;
        while let Some(i) = queue.pop_front() {
            visited += 1;
            for &c in &children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        visited != self.layers.len()
    }
}

impl LayerSpec {
    fn err(&self, msg: impl Into<String>) -> ModelError {
        ModelError::Layer { id: self.id.clone(), msg: msg.into() }
    }

    fn validate_fields(&self) -> Result<(), ModelError> {
        if self.id.is_empty() {
            return Err(ModelError::Layer { id: "<empty>".into(), msg: "empty layer id".into() });
        }
        if self.kernel.0 < 1 || self.kernel.1 < 1 {
            return Err(self.err("kernel dimensions must be >= 1"));
        }
        if self.stride.0 < 1 || self.stride.1 < 1 {
            return Err(self.err("stride must be >= 1"));
        }
        if self.element_bytes != 4 {
            return Err(self.err("only FP32 elements (element_bytes = 4) are supported"));
        }
        let n_inputs = self.inputs.len();
        match self.kind {
            LayerKind::Conv | LayerKind::Fc => {
                if self.out_channels.map_or(true, |c| c < 1) {
                    return Err(self.err("conv/fc layers need out_channels >= 1"));
                }
                if n_inputs != 1 {
                    return Err(self.err("conv/fc layers take exactly one input"));
                }
            }
            LayerKind::Pool => {
                if self.pool.is_none() {
                    return Err(self.err("pool layers need a `pool` kind"));
                }
                if n_inputs != 1 {
                    return Err(self.err("pool layers take exactly one input"));
                }
            }
            LayerKind::Act => {
                if self.act.is_none() {
                    return Err(self.err("act layers need an `act` kind"));
                }
                if n_inputs != 1 {
                    return Err(self.err("act layers take exactly one input"));
                }
            }
            LayerKind::Class => {
                if n_inputs != 1 {
                    return Err(self.err("class layers take exactly one input"));
                }
            }
            LayerKind::Concat | LayerKind::EltwiseAdd => {
                if n_inputs < 2 {
                    return Err(self.err("concat/eltwise_add layers need at least two inputs"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conv(id: &str, input: &str, co: u32) -> LayerSpec {
        LayerSpec {
            id: id.into(),
            kind: LayerKind::Conv,
            inputs: vec![input.into()],
            kernel: (3, 3),
            stride: (1, 1),
            padding: (1, 1),
            out_channels: Some(co),
            pool: None,
            act: None,
            bias: true,
            element_bytes: 4,
        }
    }

    fn minimal() -> NetworkDescriptor {
        NetworkDescriptor {
            name: "minimal".into(),
            input_shape: crate::model::Shape3D { x: 224, y: 224, c: 3 },
            layers: vec![conv("c1", INPUT_ID, 64)],
        }
    }

    #[test]
    fn minimal_descriptor_round_trips() {
        let net = minimal();
        let parsed = parse_network(&net.to_json()).unwrap();
        assert_eq!(parsed.layers.len(), 1);
        assert_eq!(parsed.layers[0].out_channels, Some(64));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_network("{\n  \"name\": ").unwrap_err();
        match err {
            ModelError::Syntax { line, .. } => assert!(line >= 2),
            other => panic!("expected syntax error, got {other}"),
        }
    }

    #[test]
    fn unknown_layer_kind_is_rejected() {
        let text = r#"{
            "name": "bad",
            "input_shape": {"x": 8, "y": 8, "c": 1},
            "layers": [{"id": "l", "kind": "deconv", "inputs": ["input"]}]
        }"#;
        assert!(matches!(parse_network(text), Err(ModelError::Syntax { .. })));
    }

    #[test]
    fn dangling_input_is_rejected() {
        let mut net = minimal();
        net.layers[0].inputs = vec!["nope".into()];
        assert!(matches!(net.validate(), Err(ModelError::DanglingInput { .. })));
    }

    #[test]
    fn cycle_is_detected() {
        let mut net = minimal();
        net.layers = vec![conv("a", "b", 8), conv("b", "a", 8)];
        assert!(matches!(net.validate(), Err(ModelError::CycleDetected { .. })));
    }

    #[test]
    fn forward_reference_without_cycle_is_an_ordering_error() {
        let mut net = minimal();
        let mut sink = conv("sink", "late", 8);
        sink.inputs = vec!["late".into()];
        net.layers = vec![sink, conv("late", INPUT_ID, 8)];
        // `late` is defined, used before its definition, and acyclic.
        assert!(matches!(net.validate(), Err(ModelError::NotTopological { .. })));
    }

    #[test]
    fn two_sinks_are_rejected() {
        let mut net = minimal();
        net.layers = vec![conv("a", INPUT_ID, 8), conv("b", INPUT_ID, 8)];
        assert!(matches!(net.validate(), Err(ModelError::SinkCount { .. })));
    }

    #[test]
    fn empty_network_is_rejected() {
        let mut net = minimal();
        net.layers.clear();
        assert!(matches!(net.validate(), Err(ModelError::Empty)));
    }
}
