use halfline::cli::{parse_args, run};

fn main() {
    let code = match parse_args(std::env::args_os()) {
        Ok(job) => run(&job),
        Err(e) => {
            if e.code == 0 {
                print!("{}", e.message);
            } else {
                eprint!("{}", e.message);
                if !e.message.ends_with('\n') {
                    eprintln!();
                }
            }
            e.code
        }
    };
    std::process::exit(code);
}
