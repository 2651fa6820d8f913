use rummikub_core::counting::{
    count_winning_hands_by_enumeration, count_winning_hands_with, CountConfig,
};
use rummikub_core::tileset::TileSetParams;

fn main() {
    let p6 = TileSetParams::new(6, 4, 2, 0).unwrap();
    let orbit = CountConfig { suit_symmetry: true, ..Default::default() };
    for t in [33u32, 34, 35, 36] {
        let t0 = std::time::Instant::now();
        let scan = count_winning_hands_by_enumeration(&p6, t);
        let scan_time = t0.elapsed();
        let t0 = std::time::Instant::now();
        let part = count_winning_hands_with(&p6, t, &orbit).unwrap();
        let part_time = t0.elapsed();
        assert_eq!(scan, part);
        println!("t={t}: winning={part} scan={scan_time:?} partition={part_time:?}");
    }
}
