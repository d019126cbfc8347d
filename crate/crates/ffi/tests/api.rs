use std::ffi::{CStr, CString};
use std::ptr;

use correq_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(correq_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn solve_ride_sharing_through_handles() {
    unsafe {
        let mut game = ptr::null_mut();
        let name = CString::new("2RS12").unwrap();
        assert_eq!(correq_game_from_manifest(name.as_ptr(), &mut game), CorreqStatus::Ok);
        assert_eq!(correq_game_num_players(game), 2);
        assert_eq!(correq_game_num_terminals(game), 400);
        let mut result = ptr::null_mut();
        let status = correq_solve(game, CorreqConcept::Efce, CorreqEngine::Dag, ptr::null(), 0, &mut result);
        assert_eq!(status, CorreqStatus::Ok, "{}", last_error());
        assert!((correq_result_value(result) - 6.010).abs() < 1e-3);
        assert!(correq_result_certified_benefit(result) <= 1e-6);
        let sw = correq_result_utility(result, 0) + correq_result_utility(result, 1);
        assert!((sw - correq_result_value(result)).abs() < 1e-9);
        assert!(correq_result_utility(result, 2).is_nan());
        let json: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(correq_result_json(result)).to_str().unwrap()).unwrap();
        assert_eq!(json["concept"], "efce");
        assert!(json["plan"].as_array().is_some_and(|p| !p.is_empty()));
        correq_result_free(result);
        correq_game_free(game);
    }
}

#[test]
fn weights_pick_a_player() {
    let json = r#"{"players": 2, "root": 0, "nodes": [
        {"id": 0, "kind": "player", "player": 1, "infoset": 0, "actions": [{"label": "l", "child": 1}, {"label": "r", "child": 2}]},
        {"id": 1, "kind": "terminal", "payoffs": ["3", "0"]},
        {"id": 2, "kind": "terminal", "payoffs": ["1", "5"]}]}"#;
    unsafe {
        let mut game = ptr::null_mut();
        let text = CString::new(json).unwrap();
        assert_eq!(correq_game_from_json(text.as_ptr(), &mut game), CorreqStatus::Ok, "{}", last_error());
        let mut result = ptr::null_mut();
        let w = [0.0, 1.0];
        let status = correq_solve(game, CorreqConcept::Nfcce, CorreqEngine::Dag, w.as_ptr(), 2, &mut result);
        assert_eq!(status, CorreqStatus::Ok, "{}", last_error());
        // Player 1 moves alone, so the only equilibrium picks l.
        assert_eq!(correq_result_value(result), 0.0);
        correq_result_free(result);
        let bad = correq_solve(game, CorreqConcept::Nfcce, CorreqEngine::Dag, w.as_ptr(), 1, &mut result);
        assert_eq!(bad, CorreqStatus::InvalidArgument);
        assert!(result.is_null());
        correq_game_free(game);
    }
}

#[test]
fn errors_and_null_handles() {
    unsafe {
        let mut game = ptr::null_mut();
        let name = CString::new("nope").unwrap();
        assert_eq!(correq_game_from_manifest(name.as_ptr(), &mut game), CorreqStatus::LoadFailed);
        assert!(game.is_null());
        assert!(last_error().contains("nope"));
        assert_eq!(correq_game_from_manifest(ptr::null(), &mut game), CorreqStatus::NullPointer);
        let text = CString::new("{not json").unwrap();
        assert_eq!(correq_game_from_json(text.as_ptr(), &mut game), CorreqStatus::LoadFailed);
        assert_eq!(correq_game_num_players(ptr::null()), 0);
        assert!(correq_result_value(ptr::null()).is_nan());
        assert!(correq_result_json(ptr::null()).is_null());
        let mut result = ptr::null_mut();
        let s = correq_solve(ptr::null(), CorreqConcept::Efce, CorreqEngine::Auto, ptr::null(), 0, &mut result);
        assert_eq!(s, CorreqStatus::NullPointer);
        correq_game_free(ptr::null_mut());
        correq_result_free(ptr::null_mut());
    }
}
