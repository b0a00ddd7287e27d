use std::ffi::{c_char, CStr};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use charging_games_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; cg_last_error_length()];
    assert_eq!(unsafe { cg_last_error_message(buf.as_mut_ptr(), buf.len()) }, CgStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn quadratic() -> *mut CgCost {
    let mut cost = ptr::null_mut();
    assert_eq!(unsafe { cg_cost_power(2.0, &mut cost) }, CgStatus::Ok);
    cost
}

#[test]
fn atomic_counterexample_through_the_c_interface() {
    let cost = quadratic();
    let exo = [1.0, 2.0, 3.0, 2.0, 1.0, 3.0];
    let (a, d, c) = ([1usize; 3], [6usize; 3], [2usize; 3]);
    let mut game = ptr::null_mut();
    let status = unsafe {
        cg_atomic_game_new(6, exo.as_ptr(), 1.0, a.as_ptr(), d.as_ptr(), c.as_ptr(), 3, cost, &mut game)
    };
    assert_eq!(status, CgStatus::Ok);

    let mut set = ptr::null_mut();
    assert_eq!(unsafe { cg_atomic_enumerate(game, 1_000_000, &mut set) }, CgStatus::Ok);
    let mut count = 0;
    assert_eq!(unsafe { cg_equilibrium_set_len(set, &mut count) }, CgStatus::Ok);
    assert_eq!(count, 3);
    let mut occ = [0u32; 6];
    assert_eq!(unsafe { cg_equilibrium_set_occupancy(set, 0, occ.as_mut_ptr(), 6) }, CgStatus::Ok);
    assert_eq!(occ, [1, 1, 0, 1, 2, 1]);
    assert_eq!(unsafe { cg_equilibrium_set_occupancy(set, 0, occ.as_mut_ptr(), 5) }, CgStatus::BufferTooSmall);
    assert_eq!(unsafe { cg_equilibrium_set_occupancy(set, 9, occ.as_mut_ptr(), 6) }, CgStatus::InvalidArgument);
    assert!(last_error().contains("out of 3"));

    let mut efficiency = 0.0;
    assert_eq!(unsafe { cg_atomic_efficiency(game, 1_000_000, &mut efficiency) }, CgStatus::Ok);
    assert_eq!(efficiency, 1.0);
    assert_eq!(unsafe { cg_atomic_efficiency(game, 2, &mut efficiency) }, CgStatus::BudgetExceeded);
    assert_eq!(unsafe { cg_atomic_enumerate(game, 2, &mut set) }, CgStatus::BudgetExceeded);
    let mut proportion = 0.0;
    assert_eq!(unsafe { cg_atomic_ne_proportion(game, 1_000_000, &mut proportion) }, CgStatus::Ok);
    assert!(proportion > 0.0 && proportion < 1.0);

    unsafe {
        cg_equilibrium_set_free(set);
        cg_atomic_game_free(game);
        cg_cost_free(cost);
    }
}

#[test]
fn nonatomic_calls() {
    let cost = quadratic();
    let exo = [0.0; 10];
    let mut inst = ptr::null_mut();
    let status = unsafe {
        cg_nonatomic_instance_new(10, exo.as_ptr(), 1.0, [1.0].as_ptr(), [1].as_ptr(), [10].as_ptr(), [5].as_ptr(), 1, &mut inst)
    };
    assert_eq!(status, CgStatus::Ok);
    let mut x = [0.0; 10];
    let mut gap = 1.0;
    assert_eq!(unsafe { cg_nonatomic_equilibrium(inst, cost, 1e-9, x.as_mut_ptr(), 10, &mut gap) }, CgStatus::Ok);
    assert!((x[0] - 0.5).abs() < 1e-8 && (x[5] - 0.5).abs() < 1e-8 && gap <= 1e-9);
    let mut efficiency = 0.0;
    assert_eq!(unsafe { cg_nonatomic_efficiency(inst, cost, 1e-9, &mut efficiency) }, CgStatus::Ok);
    assert!((efficiency - 1.0).abs() < 1e-6);

    let mut sqrt = ptr::null_mut();
    assert_eq!(unsafe { cg_cost_sqrt(&mut sqrt) }, CgStatus::Ok);
    assert_eq!(unsafe { cg_nonatomic_efficiency(inst, sqrt, 1e-9, &mut efficiency) }, CgStatus::AssumptionViolated);

    let mut s = [0.0; 8];
    assert_eq!(unsafe { cg_symmetric_invariant(exo.as_ptr(), 10, 3, s.as_mut_ptr(), 8) }, CgStatus::Ok);
    assert!((s[0] - 0.25).abs() < 1e-12 && (s[7] - 0.25).abs() < 1e-12);
    let bumpy = [0.1, 0.2, 0.3, 0.4, 0.5, 0.2, 0.2, 0.3, 0.2, 0.1, 0.2];
    assert_eq!(unsafe { cg_symmetric_invariant(bumpy.as_ptr(), 11, 5, s.as_mut_ptr(), 8) }, CgStatus::ConditionViolated);

    unsafe {
        cg_nonatomic_instance_free(inst);
        cg_cost_free(cost);
        cg_cost_free(sqrt);
    }
}

#[test]
fn bad_input_is_reported() {
    let mut cost = ptr::null_mut();
    assert_eq!(unsafe { cg_cost_power(-1.0, &mut cost) }, CgStatus::InvalidCost);
    assert!(cost.is_null());
    assert!(!last_error().is_empty());

    let mut inst = ptr::null_mut();
    let status = unsafe {
        cg_nonatomic_instance_new(4, ptr::null(), 1.0, [1.0].as_ptr(), [1].as_ptr(), [4].as_ptr(), [2].as_ptr(), 1, &mut inst)
    };
    assert_eq!(status, CgStatus::NullPointer);
    let status = unsafe {
        cg_nonatomic_instance_new(4, [0.0; 4].as_ptr(), 1.0, [0.6].as_ptr(), [1].as_ptr(), [4].as_ptr(), [2].as_ptr(), 1, &mut inst)
    };
    assert_eq!(status, CgStatus::InvalidInstance);
    assert!(last_error().contains("weights"));
    assert_eq!(unsafe { cg_atomic_efficiency(ptr::null(), 10, &mut 0.0) }, CgStatus::NullPointer);

    let version = unsafe { CStr::from_ptr(cg_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/charging_games.h")
}

#[test]
fn header_compiles_as_c() {
    let out = Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"]).arg(header()).output();
    let Ok(out) = out else {
        eprintln!("no C compiler available, header not checked");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

const PROGRAM: &str = r#"
#include <stdio.h>
#include "charging_games.h"

int main(void) {
    CgCost *cost = NULL;
    if (cg_cost_power(2.0, &cost) != CG_STATUS_OK) return 1;
    double exo[6] = {1, 2, 3, 2, 1, 3};
    size_t a[3] = {1, 1, 1}, d[3] = {6, 6, 6}, c[3] = {2, 2, 2};
    CgAtomicGame *game = NULL;
    if (cg_atomic_game_new(6, exo, 1.0, a, d, c, 3, cost, &game) != CG_STATUS_OK) return 2;
    CgEquilibriumSet *set = NULL;
    if (cg_atomic_enumerate(game, 1000000, &set) != CG_STATUS_OK) return 3;
    size_t n = 0;
    cg_equilibrium_set_len(set, &n);
    printf("%zu\n", n);
    cg_equilibrium_set_free(set);
    cg_atomic_game_free(game);
    cg_cost_free(cost);
    return 0;
}
"#;

/// Links a C program against the static library built next to this test binary.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libcharging_games_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("static library or C compiler missing, link test skipped");
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let bin = dir.join("main");
    let out = Command::new("cc")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "3");
    let _ = std::fs::remove_dir_all(&dir);
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cg-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
