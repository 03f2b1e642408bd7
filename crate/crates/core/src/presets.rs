//! Catalog of the 17 plane groups and a few 3D demonstration groups.

use crate::error::{Error, Result};
use crate::group::CrystalGroup;
use crate::io::group_from_json;

const PRESETS: &[(&str, &str)] = &[
    ("p1", include_str!("../presets/p1.json")),
    ("p2", include_str!("../presets/p2.json")),
    ("pm", include_str!("../presets/pm.json")),
    ("pg", include_str!("../presets/pg.json")),
    ("cm", include_str!("../presets/cm.json")),
    ("pmm", include_str!("../presets/pmm.json")),
    ("pmg", include_str!("../presets/pmg.json")),
    ("pgg", include_str!("../presets/pgg.json")),
    ("cmm", include_str!("../presets/cmm.json")),
    ("p4", include_str!("../presets/p4.json")),
    ("p4m", include_str!("../presets/p4m.json")),
    ("p4g", include_str!("../presets/p4g.json")),
    ("p3", include_str!("../presets/p3.json")),
    ("p3m1", include_str!("../presets/p3m1.json")),
    ("p31m", include_str!("../presets/p31m.json")),
    ("p6", include_str!("../presets/p6.json")),
    ("p6m", include_str!("../presets/p6m.json")),
    ("P1", include_str!("../presets/P1.json")),
    ("P-1", include_str!("../presets/P-1.json")),
    ("P222", include_str!("../presets/P222.json")),
    ("Pm-3m", include_str!("../presets/Pm-3m.json")),
];

/// The 17 wallpaper group symbols.
pub const WALLPAPER_GROUPS: [&str; 17] = [
    "p1", "p2", "pm", "pg", "cm", "pmm", "pmg", "pgg", "cmm", "p4", "p4m", "p4g", "p3", "p3m1", "p31m", "p6", "p6m",
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset(name: &str) -> Result<CrystalGroup> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_owned()))?;
    group_from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf, QMatrix};

    #[test]
    fn all_presets_validate() {
        for name in preset_names() {
            let g = preset(name).unwrap();
            assert_eq!(g.name(), Some(name));
        }
    }

    #[test]
    fn orders() {
        let expect = [
            ("p1", 1),
            ("p2", 2),
            ("pm", 2),
            ("pg", 2),
            ("cm", 2),
            ("pmm", 4),
            ("pmg", 4),
            ("pgg", 4),
            ("cmm", 4),
            ("p4", 4),
            ("p4m", 8),
            ("p4g", 8),
            ("p3", 3),
            ("p3m1", 6),
            ("p31m", 6),
            ("p6", 6),
            ("p6m", 12),
            ("Pm-3m", 48),
        ];
        for (name, order) in expect {
            assert_eq!(preset(name).unwrap().order(), order, "{name}");
        }
    }

    #[test]
    fn grams() {
        let hex = QMatrix::from_rows(vec![vec![q(1), qf(-1, 2)], vec![qf(-1, 2), q(1)]]);
        for name in ["p3", "p3m1", "p31m", "p6", "p6m"] {
            assert_eq!(preset(name).unwrap().gram(), &hex);
        }
        assert!(preset("p4m").unwrap().gram().is_identity());
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(preset("p5"), Err(Error::UnknownPreset(_))));
    }
}
