//! The bundled example files, embedded at build time.

pub const FILES: &[(&str, &str)] = &[
    ("nat_adhoc.af2", include_str!("../corpus/nat_adhoc.af2")),
    ("nat_equi.af2", include_str!("../corpus/nat_equi.af2")),
    ("nat_iso.af2", include_str!("../corpus/nat_iso.af2")),
    ("conat.af2", include_str!("../corpus/conat.af2")),
    ("stream.af2", include_str!("../corpus/stream.af2")),
    ("order.af2", include_str!("../corpus/order.af2")),
    ("obseq.af2", include_str!("../corpus/obseq.af2")),
];

pub fn get(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}
