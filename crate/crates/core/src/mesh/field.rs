use std::io::Write;

use super::{MeshError, SurfaceTessellation};

/// A finite scalar per vertex (the coded function `h`), tagged with a name.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexField {
    name: String,
    values: Vec<f64>,
}

impl VertexField {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self, MeshError> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(MeshError::NonFiniteField(i));
        }
        Ok(Self {
            name: name.into(),
            values,
        })
    }

    /// A field with the same value everywhere.
    pub fn constant(name: impl Into<String>, value: f64, len: usize) -> Result<Self, MeshError> {
        Self::new(name, vec![value; len])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_matches(&self, mesh: &SurfaceTessellation) -> Result<(), MeshError> {
        if self.values.len() != mesh.num_vertices() {
            return Err(MeshError::FieldLength {
                expected: mesh.num_vertices(),
                found: self.values.len(),
            });
        }
        Ok(())
    }

    /// `vertex,value` CSV with round-trip exact values.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "vertex,{}", self.name)?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{i},{v:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            VertexField::new("h", vec![0.0, f64::NAN]),
            Err(MeshError::NonFiniteField(1))
        ));
        assert!(VertexField::new("h", vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn length_check_and_csv() {
        let cube = crate::shapes::cube(1.0);
        let f = VertexField::constant("k2", 0.25, 8).unwrap();
        f.check_matches(&cube).unwrap();
        assert!(VertexField::constant("k2", 0.0, 3).unwrap().check_matches(&cube).is_err());
        let mut out = Vec::new();
        f.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("vertex,k2\n0,0.25\n"));
        assert_eq!(text.lines().count(), 9);
    }
}
