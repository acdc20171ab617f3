//! Label normalization for index construction.
//!
//! Replaces labels with symbols and fixes child order: object and key
//! children are sorted ascending by symbol (stable, so equal symbols keep
//! source order); array children keep source order, because sibling position
//! is what encodes element order once labels are linearized.

use crate::error::NormalizeError;
use crate::label::{LabelKind, SymbolTable};
use crate::tree::{MergedTree, NormNode, NormalizedTree};

pub fn normalize(mt: &MergedTree, table: &SymbolTable) -> Result<NormalizedTree, NormalizeError> {
    let mut nodes = Vec::with_capacity(mt.len());
    for node in mt.nodes() {
        let sym = table
            .lookup(&node.label)
            .ok_or_else(|| NormalizeError::UnknownLabel(node.label.to_string()))?;
        nodes.push(NormNode {
            sym,
            children: node.children.clone(),
            ids: node.ids.clone(),
        });
    }
    for (id, node) in mt.nodes().iter().enumerate() {
        if node.label.kind() != LabelKind::Array {
            let mut children = std::mem::take(&mut nodes[id].children);
            children.sort_by_key(|&c| nodes[c].sym);
            nodes[id].children = children;
        }
    }
    Ok(NormalizedTree::from_nodes(nodes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Label;
    use crate::merge::merge_all;
    use crate::parse::{build_symbol_table, parse_jsonl, parse_jsonl_line};

    #[test]
    fn object_children_sorted_array_children_not() {
        let corpus = parse_jsonl(r#"{"z":1,"a":2,"arr":["b","a"]}"#).unwrap();
        let table = build_symbol_table(&corpus);
        let mt = merge_all(&corpus).unwrap();
        let norm = normalize(&mt, &table).unwrap();

        // Root children ascend by symbol.
        let root = norm.node(0);
        let syms: Vec<_> = root.children.iter().map(|&c| norm.node(c).sym).collect();
        let mut sorted = syms.clone();
        sorted.sort();
        assert_eq!(syms, sorted);

        // The array keeps ["b","a"] source order even though "a" < "b".
        let arr_id = mt
            .nodes()
            .iter()
            .position(|n| n.label == Label::array())
            .unwrap();
        let arr_children: Vec<_> = norm.node(arr_id).children.clone();
        let b = table.lookup(&Label::string("b")).unwrap();
        let a = table.lookup(&Label::string("a")).unwrap();
        assert_eq!(
            arr_children.iter().map(|&c| norm.node(c).sym).collect::<Vec<_>>(),
            vec![b, a]
        );
    }

    #[test]
    fn single_node_tree_is_unchanged() {
        let tree = parse_jsonl_line("{}", 1).unwrap();
        let mt: MergedTree = (&tree).into();
        let table = SymbolTable::from_labels(tree.labels());
        let norm = normalize(&mt, &table).unwrap();
        assert_eq!(norm.len(), 1);
        assert_eq!(norm.node(0).sym, 1);
        assert_eq!(norm.node(0).ids, vec![1]);
    }

    #[test]
    fn unknown_label_is_rejected() {
        let tree = parse_jsonl_line(r#"{"a":1}"#, 1).unwrap();
        let mt: MergedTree = (&tree).into();
        let table = SymbolTable::from_labels(std::iter::once(&Label::object()));
        assert!(matches!(
            normalize(&mt, &table),
            Err(NormalizeError::UnknownLabel(_))
        ));
    }
}
