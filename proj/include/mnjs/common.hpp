#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>

namespace mnjs {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

using WarningSink = std::function<void(const std::string&)>;

namespace detail {
inline std::mutex& warning_mutex() {
    static std::mutex m;
    return m;
}
inline WarningSink& warning_sink_ref() {
    static WarningSink sink = [](const std::string& msg) { std::cerr << "mnjs warning: " << msg << '\n'; };
    return sink;
}
}  // namespace detail

/// Replaces the process-wide warning sink and returns the previous one.
inline WarningSink set_warning_sink(WarningSink sink) {
    std::lock_guard lock(detail::warning_mutex());
    std::swap(detail::warning_sink_ref(), sink);
    return sink;
}

inline void warn(const std::string& msg) {
    std::lock_guard lock(detail::warning_mutex());
    if (detail::warning_sink_ref()) detail::warning_sink_ref()(msg);
}

}  // namespace mnjs
