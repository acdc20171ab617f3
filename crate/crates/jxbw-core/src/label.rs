//! Node labels and the label ↔ symbol table.
//!
//! Every tree node carries a [`Label`]: a kind tag plus text. Kind-tagging
//! keeps roles apart — the key `"name"` and the string value `"name"` are
//! different labels and never match each other. Numbers are canonicalized to
//! a shortest round-trip decimal so `30` and `30.0` produce the same label.

use std::collections::HashMap;
use std::fmt;

/// Symbols are dense integers in `1..=sigma`; `0` is reserved for "no parent".
pub type Symbol = u32;

/// The role a label plays in a JSON tree.
///
/// The variant order defines the first key of the label total order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum LabelKind {
    Object = 0,
    Array = 1,
    Key = 2,
    String = 3,
    Number = 4,
    True = 5,
    False = 6,
    Null = 7,
}

impl LabelKind {
    pub fn from_u8(v: u8) -> Option<LabelKind> {
        Some(match v {
            0 => LabelKind::Object,
            1 => LabelKind::Array,
            2 => LabelKind::Key,
            3 => LabelKind::String,
            4 => LabelKind::Number,
            5 => LabelKind::True,
            6 => LabelKind::False,
            7 => LabelKind::Null,
            _ => return None,
        })
    }
}

/// A typed node label.
///
/// `text` is empty for `Object`, `Array`, `True`, `False`, and `Null`; it is
/// the key name for `Key` and the canonical lexeme for `String` and `Number`.
/// The derived order compares kind first, then text by byte order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    kind: LabelKind,
    text: String,
}

impl Label {
    pub fn object() -> Label {
        Label { kind: LabelKind::Object, text: String::new() }
    }

    pub fn array() -> Label {
        Label { kind: LabelKind::Array, text: String::new() }
    }

    pub fn key(name: impl Into<String>) -> Label {
        Label { kind: LabelKind::Key, text: name.into() }
    }

    pub fn string(value: impl Into<String>) -> Label {
        Label { kind: LabelKind::String, text: value.into() }
    }

    /// A number label from raw canonical text. Prefer the typed constructors.
    pub fn number(canonical: impl Into<String>) -> Label {
        Label { kind: LabelKind::Number, text: canonical.into() }
    }

    pub fn number_from_i64(v: i64) -> Label {
        Label::number(v.to_string())
    }

    pub fn number_from_u64(v: u64) -> Label {
        Label::number(v.to_string())
    }

    /// Canonicalizes through the shortest round-trip rendering of the `f64`,
    /// so `30.0` and the integer `30` share a label. Negative zero collapses
    /// to `0`.
    pub fn number_from_f64(v: f64) -> Label {
        if v == 0.0 {
            Label::number("0")
        } else {
            Label::number(v.to_string())
        }
    }

    pub fn bool(v: bool) -> Label {
        Label {
            kind: if v { LabelKind::True } else { LabelKind::False },
            text: String::new(),
        }
    }

    pub fn null() -> Label {
        Label { kind: LabelKind::Null, text: String::new() }
    }

    pub fn from_parts(kind: LabelKind, text: String) -> Label {
        Label { kind, text }
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// True for kinds that can never have children (scalar values).
    pub fn is_scalar(&self) -> bool {
        matches!(
            self.kind,
            LabelKind::String
                | LabelKind::Number
                | LabelKind::True
                | LabelKind::False
                | LabelKind::Null
        )
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LabelKind::Object => write!(f, "object"),
            LabelKind::Array => write!(f, "array"),
            LabelKind::Key => write!(f, "key:{}", self.text),
            LabelKind::String => write!(f, "str:{}", self.text),
            LabelKind::Number => write!(f, "num:{}", self.text),
            LabelKind::True => write!(f, "true"),
            LabelKind::False => write!(f, "false"),
            LabelKind::Null => write!(f, "null"),
        }
    }
}

/// An ordered bijection between labels and dense symbols `1..=sigma`.
///
/// [`SymbolTable::from_labels`] assigns symbols in label order, so sorting by
/// symbol is the same as sorting by label. [`SymbolTable::with_label_order`]
/// accepts an explicit enumeration instead; navigation and search work under
/// any bijection, only the array layout of the index changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    labels: Vec<Label>,
    index: HashMap<Label, Symbol>,
}

impl SymbolTable {
    /// Builds a table over the unique labels of `labels`, symbol order equal
    /// to label order.
    pub fn from_labels<'a>(labels: impl IntoIterator<Item = &'a Label>) -> SymbolTable {
        let mut uniq: Vec<Label> = labels.into_iter().cloned().collect();
        uniq.sort();
        uniq.dedup();
        SymbolTable::with_label_order(uniq)
    }

    /// Builds a table that enumerates `labels` in the given order.
    ///
    /// Panics if `labels` contains duplicates.
    pub fn with_label_order(labels: Vec<Label>) -> SymbolTable {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            let prev = index.insert(label.clone(), (i + 1) as Symbol);
            assert!(prev.is_none(), "duplicate label in symbol table: {label}");
        }
        SymbolTable { labels, index }
    }

    /// Number of distinct labels.
    pub fn sigma(&self) -> u32 {
        self.labels.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn lookup(&self, label: &Label) -> Option<Symbol> {
        self.index.get(label).copied()
    }

    /// The label for `sym`, which must be in `1..=sigma`.
    pub fn label(&self, sym: Symbol) -> Option<&Label> {
        if sym == 0 {
            return None;
        }
        self.labels.get(sym as usize - 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, &Label)> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| ((i + 1) as Symbol, l))
    }

    /// Total bytes of label text across all entries.
    pub fn text_bytes(&self) -> usize {
        self.labels.iter().map(|l| l.text.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_order_is_kind_then_text() {
        let mut labels = vec![
            Label::number("30"),
            Label::string("Bob"),
            Label::key("age"),
            Label::array(),
            Label::object(),
            Label::key("name"),
            Label::string("Alice"),
        ];
        labels.sort();
        assert_eq!(
            labels,
            vec![
                Label::object(),
                Label::array(),
                Label::key("age"),
                Label::key("name"),
                Label::string("Alice"),
                Label::string("Bob"),
                Label::number("30"),
            ]
        );
    }

    #[test]
    fn number_canonicalization() {
        assert_eq!(Label::number_from_f64(30.0), Label::number_from_i64(30));
        assert_eq!(Label::number_from_f64(-0.0), Label::number_from_i64(0));
        assert_eq!(Label::number_from_f64(0.5).text(), "0.5");
        assert_eq!(Label::number_from_f64(-2.5).text(), "-2.5");
        // Integral floats render without a fractional part.
        assert_eq!(Label::number_from_f64(1e3).text(), "1000");
    }

    #[test]
    fn symbol_order_matches_label_order() {
        let labels = vec![
            Label::string("b"),
            Label::object(),
            Label::key("k"),
            Label::string("a"),
        ];
        let table = SymbolTable::from_labels(&labels);
        assert_eq!(table.sigma(), 4);
        for (sa, la) in table.iter() {
            for (sb, lb) in table.iter() {
                assert_eq!(sa < sb, la < lb);
            }
        }
        assert_eq!(table.lookup(&Label::object()), Some(1));
        assert_eq!(table.label(1), Some(&Label::object()));
        assert_eq!(table.lookup(&Label::string("zzz")), None);
    }

    #[test]
    fn explicit_order_is_preserved() {
        let table = SymbolTable::with_label_order(vec![
            Label::string("z"),
            Label::object(),
            Label::string("a"),
        ]);
        assert_eq!(table.lookup(&Label::string("z")), Some(1));
        assert_eq!(table.lookup(&Label::object()), Some(2));
        assert_eq!(table.lookup(&Label::string("a")), Some(3));
    }
}
