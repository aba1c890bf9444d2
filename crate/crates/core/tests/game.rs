use uso_core::game::{compute_t, player_wins_with, wins_from, GameConfig, GameState, TValue};
use uso_core::solvers::seesaw_bound;

#[test]
fn small_values() {
    let cfg = GameConfig::default();
    let t: Vec<TValue> = (1..=4).map(|n| compute_t(n, 8, &cfg).unwrap()).collect();
    assert_eq!(
        t,
        vec![
            TValue::Exact(2),
            TValue::Exact(3),
            TValue::Exact(5),
            TValue::Exact(7)
        ]
    );
}

#[test]
fn reductions_do_not_change_values() {
    let plain = GameConfig {
        root_reduction: false,
        canonicalize: false,
        ..GameConfig::default()
    };
    let only_tt = GameConfig {
        root_reduction: false,
        ..GameConfig::default()
    };
    for n in 1..=3 {
        for q in 1..=seesaw_bound(n) {
            let want = player_wins_with(n, q, &plain).unwrap().player_wins;
            assert_eq!(player_wins_with(n, q, &only_tt).unwrap().player_wins, want);
            assert_eq!(
                player_wins_with(n, q, &GameConfig::default())
                    .unwrap()
                    .player_wins,
                want
            );
        }
    }
}

#[test]
fn threads_agree() {
    let cfg = GameConfig {
        threads: 3,
        ..GameConfig::default()
    };
    assert!(!player_wins_with(4, 6, &cfg).unwrap().player_wins);
    assert!(player_wins_with(4, 7, &cfg).unwrap().player_wins);
}

#[test]
fn positions() {
    let cfg = GameConfig::default();
    // after 0 -> 01, the vertex 01 is forced: either a sink or a clash with 0
    let s = GameState::new(2, vec![(0, 0b01)]).unwrap();
    assert!(wins_from(&s, 3, &cfg).unwrap().player_wins);
    assert!(GameState::new(2, vec![(0, 0b01), (3, 0b01)]).is_err());
    assert!(GameState::new(2, vec![(1, 0)]).is_err());
}

#[test]
fn limits() {
    let cfg = GameConfig {
        node_limit: Some(10),
        ..GameConfig::default()
    };
    assert!(player_wins_with(4, 7, &cfg).is_err());
    assert!(GameState::empty(6).is_err());
}
