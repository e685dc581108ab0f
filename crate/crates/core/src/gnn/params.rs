use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Bytes per parameter on the wire (32-bit floats).
pub const WIRE_BYTES_PER_PARAM: u64 = 4;

/// Name and shape of one tensor inside a flat parameter vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamShape {
    pub name: String,
    pub shape: Vec<usize>,
}

impl ParamShape {
    pub fn new(name: impl Into<String>, shape: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            shape,
        }
    }

    pub fn size(&self) -> usize {
        self.shape.iter().product()
    }
}

/// Ordered layout of the tensors packed into a [`ModelParams`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest(Arc<[ParamShape]>);

impl Manifest {
    pub fn new(entries: Vec<ParamShape>) -> Self {
        Self(entries.into())
    }

    pub fn entries(&self) -> &[ParamShape] {
        &self.0
    }

    pub fn num_params(&self) -> usize {
        self.0.iter().map(ParamShape::size).sum()
    }

    /// Offset of each entry in the flat vector.
    pub fn offsets(&self) -> Vec<usize> {
        let mut at = 0;
        self.0
            .iter()
            .map(|e| {
                let o = at;
                at += e.size();
                o
            })
            .collect()
    }
}

/// A flat parameter vector plus the manifest describing how to slice it.
///
/// This is the unit clients upload and the server averages.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    values: Vec<f64>,
    manifest: Manifest,
}

impl ModelParams {
    pub fn new(manifest: Manifest, values: Vec<f64>) -> Result<Self> {
        if manifest.num_params() != values.len() {
            return Err(Error::Contract(format!(
                "manifest describes {} parameters, got {}",
                manifest.num_params(),
                values.len()
            )));
        }
        Ok(Self { values, manifest })
    }

    pub fn zeros(manifest: Manifest) -> Self {
        Self {
            values: vec![0.0; manifest.num_params()],
            manifest,
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.manifest.clone())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Two parameter sets can be averaged iff their manifests are identical.
    pub fn is_compatible(&self, other: &ModelParams) -> bool {
        self.manifest == other.manifest
    }

    pub fn ensure_compatible(&self, other: &ModelParams, context: &str) -> Result<()> {
        if self.is_compatible(other) {
            Ok(())
        } else {
            Err(Error::Contract(format!("{context}: parameter manifests differ")))
        }
    }

    /// Payload size when sent as 32-bit floats.
    pub fn wire_bytes(&self) -> u64 {
        self.values.len() as u64 * WIRE_BYTES_PER_PARAM
    }

    /// Little-endian 64-bit float encoding of the values.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        self.values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    pub fn from_le_bytes(manifest: Manifest, bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(8) {
            return Err(Error::Contract(format!(
                "parameter payload of {} bytes is not a whole number of f64 values",
                bytes.len()
            )));
        }
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Self::new(manifest, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn manifest() -> Manifest {
        Manifest::new(vec![ParamShape::new("w", vec![2, 3]), ParamShape::new("b", vec![2])])
    }

    #[test]
    fn sizes_and_offsets() {
        let m = manifest();
        assert_eq!(m.num_params(), 8);
        assert_eq!(m.offsets(), vec![0, 6]);
        assert!(ModelParams::new(m.clone(), vec![0.0; 7]).is_err());
        assert_eq!(ModelParams::zeros(m).wire_bytes(), 32);
    }

    #[test]
    fn manifests_gate_compatibility() {
        let a = ModelParams::zeros(manifest());
        let b = ModelParams::zeros(Manifest::new(vec![ParamShape::new("w", vec![8])]));
        assert!(a.is_compatible(&a.zeros_like()));
        assert!(a.ensure_compatible(&b, "test").is_err());
    }

    proptest! {
        #[test]
        fn le_bytes_round_trip(values in proptest::collection::vec(any::<f64>(), 8)) {
            let p = ModelParams::new(manifest(), values).unwrap();
            let q = ModelParams::from_le_bytes(manifest(), &p.to_le_bytes()).unwrap();
            prop_assert_eq!(
                p.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                q.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
        }
    }
}
