#pragma once

// Minimal UCI engine client over a child process: uci/isready/ucinewgame,
// the Skill Level option, "position fen ... moves ...", "go movetime", and
// bestmove parsing. Line oriented with per-read timeouts.

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstring>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmcts {

struct EngineProtocolError : std::runtime_error {
    explicit EngineProtocolError(const std::string& what)
        : std::runtime_error("engine protocol: " + what) {}
};

struct EngineTimeout : std::runtime_error {
    explicit EngineTimeout(const std::string& what) : std::runtime_error("engine timeout: " + what) {}
};

class UciEngine {
public:
    explicit UciEngine(const std::string& command, std::vector<std::string> args = {}) {
        int to_child[2], from_child[2];
        if (pipe(to_child) != 0 || pipe(from_child) != 0)
            throw std::runtime_error("pipe failed: " + std::string(std::strerror(errno)));
        pid_ = fork();
        if (pid_ < 0) throw std::runtime_error("fork failed: " + std::string(std::strerror(errno)));
        if (pid_ == 0) {
            dup2(to_child[0], STDIN_FILENO);
            dup2(from_child[1], STDOUT_FILENO);
            close(to_child[0]);
            close(to_child[1]);
            close(from_child[0]);
            close(from_child[1]);
            std::vector<char*> argv;
            argv.push_back(const_cast<char*>(command.c_str()));
            for (auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
            argv.push_back(nullptr);
            execvp(command.c_str(), argv.data());
            _exit(127);
        }
        close(to_child[0]);
        close(from_child[1]);
        in_fd_ = to_child[1];
        out_fd_ = from_child[0];
    }

    UciEngine(const UciEngine&) = delete;
    UciEngine& operator=(const UciEngine&) = delete;

    ~UciEngine() {
        if (pid_ > 0) {
            try {
                send_line("quit");
            } catch (...) {
            }
            close(in_fd_);
            close(out_fd_);
            int status = 0;
            for (int i = 0; i < 50; ++i) {
                if (waitpid(pid_, &status, WNOHANG) == pid_) return;
                usleep(10'000);
            }
            kill(pid_, SIGKILL);
            waitpid(pid_, &status, 0);
        }
    }

    void handshake(int timeout_ms = 10'000) {
        send_line("uci");
        wait_for_token("uciok", timeout_ms);
        send_line("isready");
        wait_for_token("readyok", timeout_ms);
    }

    void set_skill_level(int level) {
        send_line("setoption name Skill Level value " + std::to_string(level));
    }

    void new_game(int timeout_ms = 10'000) {
        send_line("ucinewgame");
        send_line("isready");
        wait_for_token("readyok", timeout_ms);
    }

    // Returns the engine's move in UCI notation.
    std::string best_move(const std::string& fen, const std::vector<std::string>& moves,
                          int movetime_ms, int timeout_ms = 60'000) {
        std::string cmd = "position fen " + fen;
        if (!moves.empty()) {
            cmd += " moves";
            for (const auto& m : moves) cmd += " " + m;
        }
        send_line(cmd);
        send_line("go movetime " + std::to_string(movetime_ms));
        for (;;) {
            std::string line = read_line(timeout_ms);
            std::istringstream ss(line);
            std::string word;
            ss >> word;
            if (word == "bestmove") {
                std::string mv;
                ss >> mv;
                if (mv.empty() || mv == "(none)")
                    throw EngineProtocolError("no best move in line: " + line);
                return mv;
            }
        }
    }

    void send_line(const std::string& line) {
        std::string payload = line + "\n";
        ssize_t n = write(in_fd_, payload.data(), payload.size());
        if (n != static_cast<ssize_t>(payload.size()))
            throw EngineProtocolError("short write sending: " + line);
    }

    std::string read_line(int timeout_ms) {
        for (;;) {
            auto nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
            struct pollfd pfd{out_fd_, POLLIN, 0};
            int rc = poll(&pfd, 1, timeout_ms);
            if (rc == 0) throw EngineTimeout("no line within " + std::to_string(timeout_ms) + "ms");
            if (rc < 0) throw EngineProtocolError("poll failed");
            char chunk[4096];
            ssize_t n = read(out_fd_, chunk, sizeof chunk);
            if (n <= 0) throw EngineProtocolError("engine closed its output");
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

private:
    void wait_for_token(const std::string& token, int timeout_ms) {
        for (;;) {
            std::string line = read_line(timeout_ms);
            if (line == token || line.rfind(token, 0) == 0) return;
        }
    }

    pid_t pid_ = -1;
    int in_fd_ = -1;
    int out_fd_ = -1;
    std::string buffer_;
};

}  // namespace pmcts
