#include "commands.hpp"

#include "conglab/errors.hpp"

#include <cstdio>
#include <exception>

namespace {

int fail(const char* kind, const char* what, int code) {
    std::fprintf(stderr, "conglab: %s: %s\n", kind, what);
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"congestion time series lab: annotated map frames to forecast benchmarks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value file; sections named after subcommands");
    app.allow_config_extras(false);
    conglab::tools::register_commands(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the parser's message
        return conglab::UsageError::exit_code;
    } catch (const conglab::UsageError& e) {
        return fail("usage error", e.what(), e.exit_code);
    } catch (const conglab::DataError& e) {
        return fail("data error", e.what(), e.exit_code);
    } catch (const conglab::SchemaError& e) {
        return fail("schema error", e.what(), e.exit_code);
    } catch (const conglab::NumericError& e) {
        return fail("numeric error", e.what(), e.exit_code);
    } catch (const std::exception& e) {
        return fail("error", e.what(), 1);
    }
    return 0;
}
