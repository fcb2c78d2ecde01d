use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{EncoderGate, EncoderTemplate, FeatureBinding};
use crate::error::{Error, Result};
use crate::quantum::Axis;

fn rot(axis: Axis, target: usize, feature_index: usize) -> EncoderGate {
    EncoderGate::Rotation {
        axis,
        target,
        binding: FeatureBinding::new(feature_index, PI).expect("catalog bindings are valid"),
    }
}

fn rx(target: usize, feature: usize) -> EncoderGate {
    rot(Axis::X, target, feature)
}

fn ry(target: usize, feature: usize) -> EncoderGate {
    rot(Axis::Y, target, feature)
}

fn rz(target: usize, feature: usize) -> EncoderGate {
    rot(Axis::Z, target, feature)
}

fn cnot(control: usize, target: usize) -> EncoderGate {
    EncoderGate::Cnot { control, target }
}

fn build() -> Vec<EncoderTemplate> {
    let entries: Vec<(&str, &str, &str, Vec<EncoderGate>)> = vec![
        ("E01", "RY-RY", "one RY per qubit, f0 on q0 and f1 on q1", vec![ry(0, 0), ry(1, 1)]),
        ("E02", "RX-RX", "one RX per qubit, f0 on q0 and f1 on q1", vec![rx(0, 0), rx(1, 1)]),
        (
            "E03",
            "RY-RY-CNOT",
            "product RY encoding followed by an entangling CNOT",
            vec![ry(0, 0), ry(1, 1), cnot(0, 1)],
        ),
        (
            "E04",
            "RX-RY-RY-CNOT",
            "RX(f0) and RY(f1) stacked on q0, RY(f1) on q1, then CNOT",
            vec![rx(0, 0), ry(0, 1), ry(1, 1), cnot(0, 1)],
        ),
        (
            "E05",
            "RY-RZ-RY-RZ",
            "RY/RZ pairs with both features on each qubit, no entanglement",
            vec![ry(0, 0), rz(0, 1), ry(1, 1), rz(1, 0)],
        ),
        (
            "E06",
            "RX-RX-CNOT-RY",
            "RX product encoding, CNOT, then f0 re-applied on the target",
            vec![rx(0, 0), rx(1, 1), cnot(0, 1), ry(1, 0)],
        ),
        (
            "E07",
            "RY-RY-CNOT-RY-RY",
            "data re-uploading: RY layer, CNOT, second RY layer",
            vec![ry(0, 0), ry(1, 1), cnot(0, 1), ry(0, 0), ry(1, 1)],
        ),
        (
            "E08",
            "RY-RY-CNOT (crossed)",
            "features swapped across qubits, f1 on q0 and f0 on q1, then CNOT",
            vec![ry(0, 1), ry(1, 0), cnot(0, 1)],
        ),
        (
            "E09",
            "RX-RY-RX-RY-CNOT",
            "RX/RY pairs per qubit with a reversed CNOT q1->q0",
            vec![rx(0, 0), ry(0, 0), rx(1, 1), ry(1, 1), cnot(1, 0)],
        ),
        (
            "E10",
            "RY-CNOT-RY-CNOT",
            "interleaved encoding and entanglement in both directions",
            vec![ry(0, 0), cnot(0, 1), ry(1, 1), cnot(1, 0)],
        ),
    ];
    entries
        .into_iter()
        .map(|(id, name, description, gates)| {
            EncoderTemplate::new(id, name, description, gates).expect("catalog templates are valid")
        })
        .collect()
}

/// The ten built-in two-qubit encoders, in catalog order.
pub fn encoder_catalog() -> &'static [EncoderTemplate] {
    static CATALOG: OnceLock<Vec<EncoderTemplate>> = OnceLock::new();
    CATALOG.get_or_init(build)
}

pub fn find_encoder(id: &str) -> Result<&'static EncoderTemplate> {
    encoder_catalog().iter().find(|e| e.id() == id).ok_or_else(|| Error::not_found("encoder", id))
}
