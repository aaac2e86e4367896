#include "vog/recorder.hpp"

#include <exception>
#include <thread>

namespace vog {

void RecorderConfig::validate() const
{
    if (buffer_capacity < 1)
        throw Error(ErrorCode::InvalidArgument, "buffer capacity must be at least 1");
}

RecorderStats record(const FrameProducer& producer, const RecorderConfig& config, FrameSink& sink)
{
    config.validate();
    BoundedQueue<Frame> queue(config.buffer_capacity);
    RecorderStats stats;
    std::exception_ptr consumer_error;

    std::thread consumer([&] {
        try {
            while (auto frame = queue.pop()) {
                sink.write(*frame);
                ++stats.persisted;
            }
        } catch (...) {
            consumer_error = std::current_exception();
            queue.abort();
        }
    });

    std::exception_ptr producer_error;
    try {
        while (auto frame = producer()) {
            bool waited = false;
            if (!queue.push(std::move(*frame), &waited))
                break;
            ++stats.produced;
            stats.producer_waits += waited;
        }
        queue.close();
    } catch (...) {
        producer_error = std::current_exception();
        queue.close();
    }
    consumer.join();

    stats.max_occupancy = queue.max_occupancy();
    if (consumer_error)
        std::rethrow_exception(consumer_error);
    if (producer_error)
        std::rethrow_exception(producer_error);
    return stats;
}

} // namespace vog
