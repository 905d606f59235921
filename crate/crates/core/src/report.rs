//! CSV emission for experiment records.

/// A record with a fixed CSV layout.
pub trait CsvRecord {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// Shortest decimal representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

pub fn to_csv<T: CsvRecord>(rows: &[T]) -> String {
    let mut s = T::HEADER.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.fields().join(","));
        s.push('\n');
    }
    s
}
