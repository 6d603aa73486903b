use serde_json::{Map, Value as Json};

/// A rectangular numeric result with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub schema: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Map<String, Json>,
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    let mut buf = ryu::Buffer::new();
    buf.format(v).to_string()
}

impl ResultTable {
    pub fn new(schema: Vec<&'static str>) -> Self {
        Self {
            schema,
            rows: Vec::new(),
            metadata: Map::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.schema.len(),
            "row width must match the schema"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.schema.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// First non-finite entry, as `(row, column)`.
    pub fn first_non_finite(&self) -> Option<(usize, &'static str)> {
        self.rows.iter().enumerate().find_map(|(i, row)| {
            row.iter()
                .position(|v| !v.is_finite())
                .map(|j| (i, self.schema[j]))
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.schema.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_float(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn metadata_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&Json::Object(self.metadata.clone()))
            .expect("metadata is plain JSON");
        s.push('\n');
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|row| {
                Json::Object(
                    self.schema
                        .iter()
                        .zip(row)
                        .map(|(k, &v)| (k.to_string(), Json::from(v)))
                        .collect(),
                )
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("schema".into(), Json::from(self.schema.clone()));
        doc.insert("rows".into(), Json::Array(rows));
        doc.insert("metadata".into(), Json::Object(self.metadata.clone()));
        let mut s = serde_json::to_string_pretty(&Json::Object(doc)).expect("table is plain JSON");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0, std::f64::consts::TAU] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_float(0.1), "0.1");
    }

    #[test]
    fn csv_layout() {
        let mut t = ResultTable::new(vec!["t", "x", "Pi"]);
        t.push(vec![0.0, 0.5, 0.25]);
        assert_eq!(t.to_csv(), "t,x,Pi\n0.0,0.5,0.25\n");
    }

    #[test]
    fn json_rows_use_schema_keys() {
        let mut t = ResultTable::new(vec!["parameter", "max_abs_discrepancy"]);
        t.push(vec![0.1, 2e-3]);
        let doc: Json = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(doc["rows"][0]["max_abs_discrepancy"], Json::from(2e-3));
        let keys: Vec<&String> = doc["rows"][0].as_object().unwrap().keys().collect();
        assert_eq!(keys, vec!["parameter", "max_abs_discrepancy"]);
    }
}
